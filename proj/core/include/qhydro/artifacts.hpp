#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "qhydro/madelung.hpp"
#include "qhydro/wigner.hpp"

namespace qhydro {

struct ArtifactEntry {
  std::string file;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Shortest round-trip text for a double ("%.17g").
std::string format_double(double v);

/// Hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

/// Buffered CSV writer: header row, then numeric rows at 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<const char*> header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(std::initializer_list<double> values);
  void close();

 private:
  std::FILE* file_ = nullptr;
  std::filesystem::path path_;
  std::size_t columns_ = 0;
};

/// time,x,rho,S,V,Q,mask
void write_fields_csv(const std::filesystem::path& path, std::span<const MadelungFields> frames);

/// path_id,time,x[,v] for the first `max_paths` paths; positions and
/// velocities are row-major by path over `times`.
void write_trajectories_csv(const std::filesystem::path& path, std::span<const double> times,
                            std::span<const double> positions, std::span<const double> velocities,
                            std::size_t max_paths);

/// time,x,p,W
void write_wigner_csv(const std::filesystem::path& path, std::span<const WignerField> frames);

/// time,x1,x2,rho,Q,mask
void write_pair_fields_csv(const std::filesystem::path& path, std::span<const double> times,
                           std::span<const MadelungFields2D> frames);

ArtifactEntry make_entry(const std::filesystem::path& directory, const std::string& file);

}  // namespace qhydro
