#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "acrom/error.hpp"
#include "acrom/io.hpp"

namespace acrom::io {

namespace {

constexpr const char* kMagic = "acrom-artifact";

struct KindName {
  ArtifactKind kind;
  const char* name;
};
constexpr KindName kKinds[] = {{ArtifactKind::Mesh, "mesh"},
                               {ArtifactKind::Snapshots, "snapshots"},
                               {ArtifactKind::Basis, "basis"},
                               {ArtifactKind::Trajectory, "trajectory"},
                               {ArtifactKind::Checkpoint, "checkpoint"}};

std::string to_hex(const unsigned char* d, unsigned n) {
  static const char* digits = "0123456789abcdef";
  std::string s(2 * n, '0');
  for (unsigned i = 0; i < n; ++i) {
    s[2 * i] = digits[d[i] >> 4];
    s[2 * i + 1] = digits[d[i] & 15];
  }
  return s;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("sha256: init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  void update(const void* p, std::size_t n) {
    if (EVP_DigestUpdate(ctx_, p, n) != 1) throw Error("sha256: update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned n = 0;
    if (EVP_DigestFinal_ex(ctx_, md, &n) != 1) throw Error("sha256: final failed");
    return to_hex(md, n);
  }

 private:
  EVP_MD_CTX* ctx_;
};

// Payload bytes in little-endian order.
std::string encode(std::span<const double> values) {
  std::string bytes(values.size() * 8, '\0');
  std::memcpy(bytes.data(), values.data(), bytes.size());
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < values.size(); ++i) std::reverse(bytes.begin() + 8 * i, bytes.begin() + 8 * i + 8);
  return bytes;
}

ArtifactHeader parse_header(const std::string& line, const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": unreadable artifact header (" + e.what() + ")");
  }
  if (!j.is_object() || j.value("format", "") != kMagic)
    throw FormatError(path.string() + ": not an acrom artifact");
  ArtifactHeader h;
  try {
    h.format_version = j.at("version").get<int>();
    if (h.format_version != kArtifactVersion)
      throw VersionError(path.string() + ": unsupported artifact format version " +
                         std::to_string(h.format_version) + " (this build reads version " +
                         std::to_string(kArtifactVersion) + ")");
    h.kind = kind_from_name(j.at("kind").get<std::string>());
    h.meta = j.at("meta");
    h.payload_values = j.at("payload_values").get<std::uint64_t>();
    h.payload_sha256 = j.at("payload_sha256").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": malformed artifact header (" + e.what() + ")");
  }
  return h;
}

std::string read_header_line(std::ifstream& f, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(f, line) || f.eof()) throw FormatError(path.string() + ": truncated artifact header");
  return line;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingArtifactError("missing artifact: " + path.string());
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

}  // namespace

std::string kind_name(ArtifactKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.name;
  throw Error("unknown artifact kind");
}

ArtifactKind kind_from_name(const std::string& name) {
  for (const auto& k : kKinds)
    if (name == k.name) return k.kind;
  throw FormatError("unknown artifact kind '" + name + "'");
}

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_hex(std::span<const double> values) { return sha256_hex(encode(values)); }

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream f = open_for_read(path);
  Sha256 h;
  char buf[1 << 16];
  while (f) {
    f.read(buf, sizeof buf);
    h.update(buf, static_cast<std::size_t>(f.gcount()));
  }
  return h.hex();
}

void write_artifact(const std::filesystem::path& path, ArtifactKind kind, const nlohmann::json& meta,
                    std::span<const double> payload) {
  const std::string bytes = encode(payload);
  nlohmann::json j;
  j["format"] = kMagic;
  j["version"] = kArtifactVersion;
  j["kind"] = kind_name(kind);
  j["meta"] = meta;
  j["payload_values"] = payload.size();
  j["payload_sha256"] = sha256_hex(bytes);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    const std::string head = j.dump() + "\n";
    f.write(head.data(), static_cast<std::streamsize>(head.size()));
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.flush();
    if (!f) throw IoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ArtifactHeader read_artifact_header(const std::filesystem::path& path) {
  std::ifstream f = open_for_read(path);
  return parse_header(read_header_line(f, path), path);
}

Artifact read_artifact(const std::filesystem::path& path) {
  std::ifstream f = open_for_read(path);
  Artifact a;
  a.header = parse_header(read_header_line(f, path), path);
  const std::uint64_t n = a.header.payload_values;
  std::string bytes(n * 8, '\0');
  f.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::uint64_t>(f.gcount()) != bytes.size())
    throw FormatError(path.string() + ": truncated payload (expected " + std::to_string(n * 8) + " bytes, found " +
                      std::to_string(f.gcount()) + ")");
  if (f.peek() != std::char_traits<char>::eof()) throw FormatError(path.string() + ": trailing bytes after payload");
  if (sha256_hex(bytes) != a.header.payload_sha256)
    throw HashMismatchError(path.string() + ": payload hash does not match header");
  if constexpr (std::endian::native == std::endian::big)
    for (std::uint64_t i = 0; i < n; ++i) std::reverse(bytes.begin() + 8 * i, bytes.begin() + 8 * i + 8);
  a.payload.resize(n);
  std::memcpy(a.payload.data(), bytes.data(), bytes.size());
  return a;
}

}  // namespace acrom::io
