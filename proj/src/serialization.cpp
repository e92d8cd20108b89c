#include "admm/serialization.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace admm {

using nlohmann::json;

namespace {
constexpr const char* kInstanceSchema = "admm-instance/1";
constexpr const char* kCertSchema = "admm-certificate/1";
}  // namespace

std::string double_to_hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double hex_to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw std::invalid_argument("hex_to_double: unparsable value '" + s + "'");
  return v;
}

json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(double_to_hex(v[i]));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = hex_to_double(j[i].get<std::string>());
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int jj = 0; jj < m.cols(); ++jj) out.push_back(double_to_hex(m(i, jj)));
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, int rows, int cols) {
  if (static_cast<int>(j.size()) != rows * cols) throw std::invalid_argument("matrix_from_json: size mismatch");
  Eigen::MatrixXd m(rows, cols);
  std::size_t idx = 0;
  for (int i = 0; i < rows; ++i)
    for (int jj = 0; jj < cols; ++jj) m(i, jj) = hex_to_double(j[idx++].get<std::string>());
  return m;
}

json instance_to_json(const GeneratedInstance& instance) {
  const BlockProblem& pb = instance.problem;
  json j;
  j["schema"] = kInstanceSchema;
  j["family"] = to_string(instance.spec.family);
  j["seed"] = instance.spec.seed;
  j["B"] = instance.spec.B;
  j["nbar"] = instance.spec.nbar;
  j["l"] = instance.spec.l;
  j["omega"] = double_to_hex(instance.spec.omega);
  json dims = json::array();
  for (int d : pb.dims()) dims.push_back(d);
  j["dims"] = dims;

  json a = json::array();
  for (int t = 0; t < pb.blocks(); ++t) a.push_back(matrix_to_json(pb.constraint_block(t)));
  j["A"] = a;
  j["b"] = vector_to_json(pb.rhs());

  Eigen::VectorXd lo(pb.dim()), hi(pb.dim());
  int off = 0;
  for (int t = 0; t < pb.blocks(); ++t) {
    lo.segment(off, pb.dims()[t]) = pb.box(t).lo;
    hi.segment(off, pb.dims()[t]) = pb.box(t).hi;
    off += pb.dims()[t];
  }
  j["box_lo"] = vector_to_json(lo);
  j["box_hi"] = vector_to_json(hi);

  j["m"] = pb.weak_convexity() ? vector_to_json(*pb.weak_convexity()) : json();
  j["cross_lipschitz"] = pb.cross_block_lipschitz() ? vector_to_json(*pb.cross_block_lipschitz()) : json();

  json payload;
  switch (instance.spec.family) {
    case Family::Dqp: {
      const auto* oracle = dynamic_cast<const BlockSeparableQuadraticOracle*>(&pb.smooth());
      if (!oracle) throw std::logic_error("instance_to_json: oracle/family mismatch");
      json p = json::array(), r = json::array();
      for (const auto& pi : oracle->p()) p.push_back(matrix_to_json(pi));
      for (const auto& ri : oracle->r()) r.push_back(vector_to_json(ri));
      payload["P"] = p;
      payload["r"] = r;
      break;
    }
    case Family::Cauchy: {
      const auto* oracle = dynamic_cast<const CauchyLossOracle*>(&pb.smooth());
      if (!oracle) throw std::logic_error("instance_to_json: oracle/family mismatch");
      payload["alpha"] = vector_to_json(oracle->alpha());
      payload["y"] = vector_to_json(oracle->y_obs());
      json z = json::array();
      for (const auto& zi : oracle->z()) z.push_back(vector_to_json(zi));
      payload["z"] = z;
      break;
    }
    case Family::Qpbc: {
      const auto* oracle = dynamic_cast<const DenseQuadraticOracle*>(&pb.smooth());
      if (!oracle) throw std::logic_error("instance_to_json: oracle/family mismatch");
      payload["P"] = matrix_to_json(oracle->p());
      payload["r"] = vector_to_json(oracle->r());
      break;
    }
  }
  j["payload"] = payload;

  j["x0"] = vector_to_json(instance.x0.flat());
  j["x_b"] = vector_to_json(instance.x_b.flat());
  j["slater_distance"] = double_to_hex(instance.slater_distance);
  return j;
}

GeneratedInstance instance_from_json(const json& j) {
  if (j.value("schema", "") != kInstanceSchema)
    throw std::invalid_argument("instance_from_json: unknown or missing schema tag");
  InstanceSpec spec;
  spec.family = family_from_string(j.at("family").get<std::string>());
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.B = j.at("B").get<int>();
  spec.nbar = j.at("nbar").get<int>();
  spec.l = j.at("l").get<int>();
  spec.omega = hex_to_double(j.at("omega").get<std::string>());

  std::vector<int> dims(spec.B, spec.family == Family::Qpbc ? 1 : spec.nbar);
  if (j.contains("dims")) {
    std::vector<int> stored;
    for (const auto& d : j.at("dims")) stored.push_back(d.get<int>());
    if (stored != dims) throw std::invalid_argument("instance_from_json: dims do not match the size key");
  }
  std::vector<Eigen::MatrixXd> a;
  for (const auto& blk : j.at("A")) a.push_back(matrix_from_json(blk, spec.l, dims[a.size()]));
  Eigen::VectorXd b = vector_from_json(j.at("b"));

  const Eigen::VectorXd lo = vector_from_json(j.at("box_lo"));
  const Eigen::VectorXd hi = vector_from_json(j.at("box_hi"));
  std::vector<BoxIndicator> boxes;
  int off = 0;
  for (int t = 0; t < spec.B; ++t) {
    boxes.emplace_back(lo.segment(off, dims[t]), hi.segment(off, dims[t]));
    off += dims[t];
  }

  std::optional<Eigen::VectorXd> m;
  if (!j.at("m").is_null()) m = vector_from_json(j.at("m"));
  std::optional<Eigen::VectorXd> l_gt;
  if (!j.at("cross_lipschitz").is_null()) l_gt = vector_from_json(j.at("cross_lipschitz"));

  std::shared_ptr<const SmoothOracle> oracle;
  const json& payload = j.at("payload");
  switch (spec.family) {
    case Family::Dqp: {
      std::vector<Eigen::MatrixXd> p;
      std::vector<Eigen::VectorXd> r;
      for (const auto& pi : payload.at("P")) p.push_back(matrix_from_json(pi, spec.nbar, spec.nbar));
      for (const auto& ri : payload.at("r")) r.push_back(vector_from_json(ri));
      oracle = std::make_shared<BlockSeparableQuadraticOracle>(std::move(p), std::move(r));
      break;
    }
    case Family::Cauchy: {
      std::vector<Eigen::VectorXd> z;
      for (const auto& zi : payload.at("z")) z.push_back(vector_from_json(zi));
      oracle = std::make_shared<CauchyLossOracle>(vector_from_json(payload.at("alpha")),
                                                  vector_from_json(payload.at("y")), std::move(z));
      break;
    }
    case Family::Qpbc: {
      auto dense = std::make_shared<DenseQuadraticOracle>(matrix_from_json(payload.at("P"), spec.B, spec.B),
                                                          vector_from_json(payload.at("r")));
      dense->finalize_blocks(dims);
      oracle = std::move(dense);
      break;
    }
  }

  BlockProblem problem(dims, std::move(oracle), std::move(a), std::move(b), std::move(boxes), std::move(m),
                       std::move(l_gt));
  BlockVector x0(dims, vector_from_json(j.at("x0")));
  BlockVector xb(dims, vector_from_json(j.at("x_b")));
  const double slater = hex_to_double(j.at("slater_distance").get<std::string>());
  return GeneratedInstance{spec, std::move(problem), std::move(x0), std::move(xb), slater};
}

void save_instance(const GeneratedInstance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_instance: cannot write " + path);
  out << instance_to_json(instance).dump(1) << "\n";
}

GeneratedInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_instance: cannot read " + path);
  json j;
  in >> j;
  return instance_from_json(j);
}

json certificate_to_json(const SavedCertificate& cert, const std::vector<int>& dims) {
  json j;
  j["schema"] = kCertSchema;
  json d = json::array();
  for (int v : dims) d.push_back(v);
  j["dims"] = d;
  j["x"] = vector_to_json(cert.certificate.x_hat.flat());
  j["p"] = vector_to_json(cert.certificate.p_hat);
  j["v"] = vector_to_json(cert.certificate.v_hat.flat());
  j["eps"] = double_to_hex(cert.certificate.eps_hat);
  j["rho"] = double_to_hex(cert.rho);
  j["eta"] = double_to_hex(cert.eta);
  j["mode"] = cert.mode == ToleranceMode::Relative ? "relative" : "absolute";
  j["s_v"] = double_to_hex(cert.scales.s_v);
  j["s_feas"] = double_to_hex(cert.scales.s_feas);
  return j;
}

SavedCertificate certificate_from_json(const json& j) {
  if (j.value("schema", "") != kCertSchema)
    throw std::invalid_argument("certificate_from_json: unknown or missing schema tag");
  std::vector<int> dims;
  for (const auto& d : j.at("dims")) dims.push_back(d.get<int>());
  SavedCertificate out;
  out.certificate.x_hat = BlockVector(dims, vector_from_json(j.at("x")));
  out.certificate.p_hat = vector_from_json(j.at("p"));
  out.certificate.v_hat = BlockVector(dims, vector_from_json(j.at("v")));
  out.certificate.eps_hat = hex_to_double(j.at("eps").get<std::string>());
  out.rho = hex_to_double(j.at("rho").get<std::string>());
  out.eta = hex_to_double(j.at("eta").get<std::string>());
  out.mode = j.at("mode").get<std::string>() == "relative" ? ToleranceMode::Relative : ToleranceMode::Absolute;
  out.scales.s_v = hex_to_double(j.at("s_v").get<std::string>());
  out.scales.s_feas = hex_to_double(j.at("s_feas").get<std::string>());
  return out;
}

void save_certificate(const SavedCertificate& cert, const std::vector<int>& dims, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_certificate: cannot write " + path);
  out << certificate_to_json(cert, dims).dump(1) << "\n";
}

SavedCertificate load_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_certificate: cannot read " + path);
  json j;
  in >> j;
  return certificate_from_json(j);
}

}  // namespace admm
