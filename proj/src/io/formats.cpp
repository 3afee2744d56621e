#include "acrom/formats.hpp"

#include "acrom/error.hpp"

namespace acrom::io {

namespace {

using nlohmann::json;

class PayloadReader {
 public:
  PayloadReader(const std::vector<double>& p, const std::filesystem::path& path) : p_(p), path_(path) {}

  const double* take(std::uint64_t n) {
    if (pos_ + n > p_.size()) throw FormatError(path_.string() + ": payload shorter than its header describes");
    const double* out = p_.data() + pos_;
    pos_ += n;
    return out;
  }
  std::vector<double> vec(std::uint64_t n) {
    const double* d = take(n);
    return {d, d + n};
  }
  Eigen::MatrixXd mat(Eigen::Index rows, Eigen::Index cols) {
    const double* d = take(static_cast<std::uint64_t>(rows * cols));
    return Eigen::Map<const Eigen::MatrixXd>(d, rows, cols);
  }
  void finish() const {
    if (pos_ != p_.size()) throw FormatError(path_.string() + ": payload longer than its header describes");
  }

 private:
  const std::vector<double>& p_;
  const std::filesystem::path& path_;
  std::uint64_t pos_ = 0;
};

void append(std::vector<double>& out, const std::vector<double>& v) { out.insert(out.end(), v.begin(), v.end()); }
void append(std::vector<double>& out, const Eigen::MatrixXd& m) { out.insert(out.end(), m.data(), m.data() + m.size()); }
void append(std::vector<double>& out, const Eigen::VectorXd& v) { out.insert(out.end(), v.data(), v.data() + v.size()); }

template <class T>
T field(const json& j, const char* key, const std::filesystem::path& path) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(path.string() + ": header is missing '" + key + "'");
  }
}

json snapshot_meta(const SnapshotSet& s) {
  json m;
  m["n_u"] = s.U.rows();
  m["n_p"] = s.P.rows();
  m["count"] = s.count();
  m["steps_logged"] = s.step_times.size();
  m["config"] = config_to_json(s.config);
  m["mesh_hash"] = s.mesh_hash;
  return m;
}

void snapshot_payload(const SnapshotSet& s, std::vector<double>& out) {
  append(out, s.times);
  append(out, s.U);
  append(out, s.P);
  append(out, s.step_times);
  append(out, s.step_energy);
  append(out, s.step_residual);
}

SnapshotSet read_snapshot_part(const json& m, PayloadReader& in, const std::filesystem::path& path) {
  SnapshotSet s;
  const auto n_u = field<Eigen::Index>(m, "n_u", path);
  const auto n_p = field<Eigen::Index>(m, "n_p", path);
  const auto count = field<Eigen::Index>(m, "count", path);
  const auto steps = field<std::uint64_t>(m, "steps_logged", path);
  s.config = config_from_json(m.at("config"));
  s.mesh_hash = field<std::string>(m, "mesh_hash", path);
  s.times = in.vec(static_cast<std::uint64_t>(count));
  s.U = in.mat(n_u, count);
  s.P = in.mat(n_p, count);
  s.step_times = in.vec(steps);
  s.step_energy = in.vec(steps);
  s.step_residual = in.vec(steps);
  return s;
}

Artifact read_kind(const std::filesystem::path& path, ArtifactKind kind) {
  Artifact a = read_artifact(path);
  if (a.header.kind != kind)
    throw FormatError(path.string() + ": expected a " + kind_name(kind) + " artifact, found " +
                      kind_name(a.header.kind));
  return a;
}

}  // namespace

std::string mesh_hash(const Mesh& mesh) { return sha256_hex(mesh_to_string(mesh)); }

json config_to_json(const OfflineConfig& c) {
  json j;
  j["nu"] = c.nu;
  j["dt"] = c.dt;
  j["eps"] = c.eps;
  j["t_start"] = c.t_start;
  j["t_end"] = c.t_end;
  j["snapshot_every"] = c.snapshot_every;
  j["snapshot_from"] = c.snapshot_from ? json(*c.snapshot_from) : json(nullptr);
  j["initial_state"] = c.initial_state == InitialState::Rest ? "rest" : "file";
  j["initial_path"] = c.initial_path.string();
  j["forcing"] = c.forcing == ForcingKind::Rotating ? "rotating" : "none";
  j["checkpoint_every"] = c.checkpoint_every;
  return j;
}

OfflineConfig config_from_json(const json& j) {
  OfflineConfig c;
  try {
    c.nu = j.at("nu").get<double>();
    c.dt = j.at("dt").get<double>();
    c.eps = j.at("eps").get<double>();
    c.t_start = j.at("t_start").get<double>();
    c.t_end = j.at("t_end").get<double>();
    c.snapshot_every = j.at("snapshot_every").get<int>();
    if (!j.at("snapshot_from").is_null()) c.snapshot_from = j.at("snapshot_from").get<double>();
    c.initial_state = j.at("initial_state").get<std::string>() == "rest" ? InitialState::Rest : InitialState::FromFile;
    c.initial_path = j.at("initial_path").get<std::string>();
    c.forcing = j.at("forcing").get<std::string>() == "none" ? ForcingKind::None : ForcingKind::Rotating;
    c.checkpoint_every = j.at("checkpoint_every").get<int>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("config echo: ") + e.what());
  }
  return c;
}

void save_snapshots(const std::filesystem::path& path, const SnapshotSet& s) {
  std::vector<double> payload;
  snapshot_payload(s, payload);
  write_artifact(path, ArtifactKind::Snapshots, snapshot_meta(s), payload);
}

SnapshotSet load_snapshots(const std::filesystem::path& path) {
  const Artifact a = read_kind(path, ArtifactKind::Snapshots);
  PayloadReader in(a.payload, path);
  SnapshotSet s = read_snapshot_part(a.header.meta, in, path);
  in.finish();
  return s;
}

std::string snapshot_hash(const std::filesystem::path& path) { return read_artifact_header(path).payload_sha256; }

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  json m = snapshot_meta(c.partial);
  m["step"] = c.step;
  m["t"] = c.state.t;
  m["state_n_u"] = c.state.u.size();
  m["state_n_p"] = c.state.p.size();
  std::vector<double> payload;
  append(payload, c.state.u);
  append(payload, c.state.p);
  snapshot_payload(c.partial, payload);
  write_artifact(path, ArtifactKind::Checkpoint, m, payload);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const Artifact a = read_kind(path, ArtifactKind::Checkpoint);
  const json& m = a.header.meta;
  PayloadReader in(a.payload, path);
  Checkpoint c;
  c.step = field<std::int64_t>(m, "step", path);
  c.state.t = field<double>(m, "t", path);
  c.state.u = in.mat(field<Eigen::Index>(m, "state_n_u", path), 1);
  c.state.p = in.mat(field<Eigen::Index>(m, "state_n_p", path), 1);
  c.partial = read_snapshot_part(m, in, path);
  in.finish();
  return c;
}

void save_basis(const std::filesystem::path& path, const PodBasis& b) {
  json m;
  m["field"] = field_name(b.field);
  m["weight"] = b.weight;
  m["R"] = b.size();
  m["n_dofs"] = b.dofs();
  m["n_eigenvalues"] = b.eigenvalues.size();
  m["numerical_rank"] = b.numerical_rank;
  m["source_hash"] = b.source_hash;
  std::vector<double> payload;
  append(payload, b.eigenvalues);
  append(payload, b.modes);
  write_artifact(path, ArtifactKind::Basis, m, payload);
}

PodBasis load_basis(const std::filesystem::path& path) {
  const Artifact a = read_kind(path, ArtifactKind::Basis);
  const json& m = a.header.meta;
  PayloadReader in(a.payload, path);
  PodBasis b;
  b.field = field_from_name(field<std::string>(m, "field", path));
  b.weight = field<std::string>(m, "weight", path);
  b.numerical_rank = field<int>(m, "numerical_rank", path);
  b.source_hash = field<std::string>(m, "source_hash", path);
  b.eigenvalues = in.mat(field<Eigen::Index>(m, "n_eigenvalues", path), 1);
  b.modes = in.mat(field<Eigen::Index>(m, "n_dofs", path), field<Eigen::Index>(m, "R", path));
  in.finish();
  return b;
}

void save_trajectory(const std::filesystem::path& path, const RomTrajectory& t, const json& meta) {
  json m = meta;
  m["dt"] = t.dt;
  m["R"] = t.a_u.rows();
  m["M"] = t.a_p.rows();
  m["count"] = t.count();
  std::vector<double> payload;
  append(payload, t.times);
  append(payload, t.a_u);
  append(payload, t.a_p);
  append(payload, t.kinetic_energy);
  append(payload, t.drag);
  append(payload, t.lift);
  append(payload, t.energy_residual);
  write_artifact(path, ArtifactKind::Trajectory, m, payload);
}

RomTrajectory load_trajectory(const std::filesystem::path& path) {
  const Artifact a = read_kind(path, ArtifactKind::Trajectory);
  const json& m = a.header.meta;
  PayloadReader in(a.payload, path);
  RomTrajectory t;
  t.dt = field<double>(m, "dt", path);
  const auto n = field<Eigen::Index>(m, "count", path);
  const auto un = static_cast<std::uint64_t>(n);
  t.times = in.vec(un);
  t.a_u = in.mat(field<Eigen::Index>(m, "R", path), n);
  t.a_p = in.mat(field<Eigen::Index>(m, "M", path), n);
  t.kinetic_energy = in.vec(un);
  t.drag = in.vec(un);
  t.lift = in.vec(un);
  t.energy_residual = in.vec(un);
  in.finish();
  return t;
}

}  // namespace acrom::io
