#pragma once
//
// Binary artifacts: one line of JSON header followed by a payload of
// little-endian float64 values. The header records the format version, the
// artifact kind, the payload size and its SHA-256.
//

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace acrom::io {

inline constexpr int kArtifactVersion = 1;

enum class ArtifactKind { Mesh, Snapshots, Basis, Trajectory, Checkpoint };

std::string kind_name(ArtifactKind kind);
ArtifactKind kind_from_name(const std::string& name);

struct ArtifactHeader {
  int format_version = kArtifactVersion;
  ArtifactKind kind = ArtifactKind::Snapshots;
  /// Shape metadata and parameter echo.
  nlohmann::json meta = nlohmann::json::object();
  std::uint64_t payload_values = 0;
  std::string payload_sha256;
};

struct Artifact {
  ArtifactHeader header;
  std::vector<double> payload;
};

/// Writes through a temporary file and renames, so readers never see a
/// partially written artifact. Fills in the payload size and hash.
void write_artifact(const std::filesystem::path& path, ArtifactKind kind, const nlohmann::json& meta,
                    std::span<const double> payload);

/// Throws MissingArtifactError, VersionError, HashMismatchError or FormatError.
Artifact read_artifact(const std::filesystem::path& path);
/// Reads and checks only the header line.
ArtifactHeader read_artifact_header(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);
std::string sha256_hex(std::span<const double> values);
std::string file_sha256(const std::filesystem::path& path);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

/// Minimal CSV writer: header row, then rows of doubles or strings.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(std::span<const double> values);
  void row(const std::vector<std::string>& fields);
  /// Flushes and renames the temporary file into place.
  void close();

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::size_t width_;
  std::unique_ptr<std::ofstream> out_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace acrom::io
