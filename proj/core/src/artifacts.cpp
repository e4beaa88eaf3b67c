#include "qhydro/artifacts.hpp"

#include <array>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace qhydro {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("sha256: cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256: digest initialisation failed");
  }
  std::array<char, 1 << 16> chunk{};
  while (in) {
    in.read(chunk.data(), chunk.size());
    EVP_DigestUpdate(ctx, chunk.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<const char*> header)
    : path_(path), columns_(header.size()) {
  file_ = std::fopen(path.string().c_str(), "wb");
  if (file_ == nullptr) throw std::runtime_error("csv: cannot open " + path.string());
  bool first = true;
  for (const char* h : header) {
    if (!first) std::fputc(',', file_);
    std::fputs(h, file_);
    first = false;
  }
  std::fputc('\n', file_);
}

CsvWriter::~CsvWriter() {
  if (file_ != nullptr) std::fclose(file_);
}

void CsvWriter::row(std::initializer_list<double> values) {
  if (values.size() != columns_) throw std::logic_error("csv: row width differs from header");
  std::array<char, 32> buf{};
  bool first = true;
  for (double v : values) {
    if (!first) std::fputc(',', file_);
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    std::fputs(buf.data(), file_);
    first = false;
  }
  std::fputc('\n', file_);
}

void CsvWriter::close() {
  if (file_ == nullptr) return;
  const bool failed = std::ferror(file_) != 0;
  const bool close_failed = std::fclose(file_) != 0;
  file_ = nullptr;
  if (failed || close_failed) throw std::runtime_error("csv: write failed for " + path_.string());
}

void write_fields_csv(const std::filesystem::path& path, std::span<const MadelungFields> frames) {
  CsvWriter csv(path, {"time", "x", "rho", "S", "V", "Q", "mask"});
  for (const auto& f : frames) {
    const Grid& g = f.grid();
    for (std::size_t j = 0; j < g.size(); ++j) {
      csv.row({f.time, g.x(j), f.rho.values[j], f.S.values[j], f.V.values[j], f.Q.values[j],
               f.mask[j] ? 1.0 : 0.0});
    }
  }
  csv.close();
}

void write_trajectories_csv(const std::filesystem::path& path, std::span<const double> times,
                            std::span<const double> positions, std::span<const double> velocities,
                            std::size_t max_paths) {
  const std::size_t nt = times.size();
  const std::size_t n_paths = std::min(max_paths, positions.size() / nt);
  const bool with_v = !velocities.empty();
  if (with_v) {
    CsvWriter csv(path, {"path_id", "time", "x", "v"});
    for (std::size_t p = 0; p < n_paths; ++p) {
      for (std::size_t k = 0; k < nt; ++k) {
        csv.row({static_cast<double>(p), times[k], positions[p * nt + k], velocities[p * nt + k]});
      }
    }
    csv.close();
  } else {
    CsvWriter csv(path, {"path_id", "time", "x"});
    for (std::size_t p = 0; p < n_paths; ++p) {
      for (std::size_t k = 0; k < nt; ++k) {
        csv.row({static_cast<double>(p), times[k], positions[p * nt + k]});
      }
    }
    csv.close();
  }
}

void write_wigner_csv(const std::filesystem::path& path, std::span<const WignerField> frames) {
  CsvWriter csv(path, {"time", "x", "p", "W"});
  for (const auto& w : frames) {
    for (std::size_t i = 0; i < w.grid.x.size(); ++i) {
      for (std::size_t j = 0; j < w.grid.p.size(); ++j) {
        csv.row({w.time, w.grid.x.x(i), w.grid.p.x(j), w.at(i, j)});
      }
    }
  }
  csv.close();
}

void write_pair_fields_csv(const std::filesystem::path& path, std::span<const double> times,
                           std::span<const MadelungFields2D> frames) {
  CsvWriter csv(path, {"time", "x1", "x2", "rho", "Q", "mask"});
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& fr = frames[f];
    const Grid2D& g = fr.rho.grid;
    for (std::size_t i = 0; i < g.axis1.size(); ++i) {
      for (std::size_t j = 0; j < g.axis2.size(); ++j) {
        const std::size_t idx = g.index(i, j);
        csv.row({times[f], g.axis1.x(i), g.axis2.x(j), fr.rho.values[idx], fr.Q.values[idx],
                 fr.mask[idx] ? 1.0 : 0.0});
      }
    }
  }
  csv.close();
}

ArtifactEntry make_entry(const std::filesystem::path& directory, const std::string& file) {
  const auto full = directory / file;
  return {file, sha256_file(full), std::filesystem::file_size(full)};
}

}  // namespace qhydro
