#include "admm/instance_gen.hpp"

#include <stdexcept>

#include <Eigen/QR>

#include "admm/rng.hpp"

namespace admm {
namespace {

constexpr std::uint32_t kFieldA = 0;
constexpr std::uint32_t kFieldXb = 1;
constexpr std::uint32_t kFieldX0 = 2;
constexpr std::uint32_t kFieldQ = 3;
constexpr std::uint32_t kFieldD = 4;
constexpr std::uint32_t kFieldR = 5;
constexpr std::uint32_t kFieldYObs = 6;
constexpr std::uint32_t kFieldZ = 7;
constexpr std::uint32_t kFieldAlpha = 8;

void validate(const InstanceSpec& spec) {
  if (spec.B < 1 || spec.nbar < 1 || spec.l < 1) throw std::invalid_argument("instance spec: sizes must be positive");
  if (spec.omega <= 0) throw std::invalid_argument("instance spec: omega must be positive");
  if (spec.family == Family::Qpbc && spec.nbar != 1)
    throw std::invalid_argument("instance spec: coordinate-block family requires nbar = 1");
}

std::vector<BoxIndicator> make_boxes(const std::vector<int>& dims, double omega) {
  std::vector<BoxIndicator> boxes;
  boxes.reserve(dims.size());
  for (int d : dims) boxes.push_back(BoxIndicator::centered(d, omega));
  return boxes;
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::Dqp: return "dqp";
    case Family::Cauchy: return "cauchy";
    case Family::Qpbc: return "qpbc";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  if (name == "dqp") return Family::Dqp;
  if (name == "cauchy") return Family::Cauchy;
  if (name == "qpbc") return Family::Qpbc;
  throw std::invalid_argument("unknown family: " + name);
}

Eigen::MatrixXd random_orthonormal(int n, Rng& rng) {
  const Eigen::MatrixXd g = rng.normal_matrix(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

Eigen::VectorXd indefinite_diagonal(int n, Rng& rng) {
  const int zeros = n / 3;
  const int live = n - zeros;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Eigen::VectorXd drawn = rng.uniform_vector(live, -10.0, 10.0);
    if (drawn.minCoeff() < 0) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
      d.tail(live) = drawn;
      return d;
    }
  }
  throw std::runtime_error("indefinite_diagonal: no negative entry after 1000 redraws");
}

SharedParts gen_shared(const InstanceSpec& spec, const std::vector<int>& dims) {
  SharedParts parts;
  parts.a.reserve(dims.size());
  for (std::uint32_t i = 0; i < dims.size(); ++i) {
    Rng rng = child_stream(spec.seed, kFieldA, i);
    parts.a.push_back(rng.normal_matrix(spec.l, dims[i]));
  }
  {
    Rng rng = child_stream(spec.seed, kFieldXb, 0);
    BlockVector xb(dims);
    xb.flat() = rng.uniform_vector(xb.dim(), -spec.omega / 2.0, spec.omega / 2.0);
    parts.x_b = std::move(xb);
  }
  parts.b = Eigen::VectorXd::Zero(spec.l);
  for (std::size_t t = 0; t < dims.size(); ++t)
    parts.b.noalias() += parts.a[t] * parts.x_b.block(static_cast<int>(t));
  {
    Rng rng = child_stream(spec.seed, kFieldX0, 0);
    BlockVector x0(dims);
    x0.flat() = rng.uniform_vector(x0.dim(), -spec.omega / 4.0, spec.omega / 4.0);
    parts.x0 = std::move(x0);
  }
  return parts;
}

namespace {

GeneratedInstance assemble(const InstanceSpec& spec, std::vector<int> dims, std::shared_ptr<const SmoothOracle> oracle,
                           SharedParts parts, Eigen::VectorXd m, std::optional<Eigen::VectorXd> l_gt) {
  BlockProblem problem(dims, std::move(oracle), std::move(parts.a), std::move(parts.b), make_boxes(dims, spec.omega),
                       std::move(m), std::move(l_gt));
  double d_bar = spec.omega;
  for (int j = 0; j < parts.x_b.dim(); ++j)
    d_bar = std::min({d_bar, spec.omega - parts.x_b.flat()[j], parts.x_b.flat()[j] + spec.omega});
  return GeneratedInstance{spec, std::move(problem), std::move(parts.x0), std::move(parts.x_b), d_bar};
}

}  // namespace

GeneratedInstance gen_dqp(const InstanceSpec& spec) {
  validate(spec);
  std::vector<int> dims(spec.B, spec.nbar);
  SharedParts parts = gen_shared(spec, dims);

  std::vector<Eigen::MatrixXd> p(spec.B);
  std::vector<Eigen::VectorXd> r(spec.B);
  Eigen::VectorXd m(spec.B);
  for (int i = 0; i < spec.B; ++i) {
    Rng rng_q = child_stream(spec.seed, kFieldQ, i);
    Rng rng_d = child_stream(spec.seed, kFieldD, i);
    Rng rng_r = child_stream(spec.seed, kFieldR, i);
    const Eigen::MatrixXd q = random_orthonormal(spec.nbar, rng_q);
    const Eigen::VectorXd d = indefinite_diagonal(spec.nbar, rng_d);
    Eigen::MatrixXd pi = q.transpose() * d.asDiagonal() * q;
    p[i] = 0.5 * (pi + pi.transpose());
    r[i] = rng_r.normal_vector(spec.nbar);
    m[i] = -d.minCoeff();  // the recipe guarantees a negative entry
  }
  auto oracle = std::make_shared<BlockSeparableQuadraticOracle>(std::move(p), std::move(r));
  // Separable f: the block gradient never sees trailing blocks.
  Eigen::VectorXd l_gt = Eigen::VectorXd::Zero(std::max(spec.B - 1, 0));
  return assemble(spec, std::move(dims), std::move(oracle), std::move(parts), std::move(m), std::move(l_gt));
}

GeneratedInstance gen_cauchy(const InstanceSpec& spec) {
  validate(spec);
  std::vector<int> dims(spec.B, spec.nbar);
  SharedParts parts = gen_shared(spec, dims);

  Eigen::VectorXd alpha(spec.B), y_obs(spec.B), m(spec.B);
  std::vector<Eigen::VectorXd> z(spec.B);
  for (int i = 0; i < spec.B; ++i) {
    y_obs[i] = child_stream(spec.seed, kFieldYObs, i).normal();
    z[i] = child_stream(spec.seed, kFieldZ, i).normal_vector(spec.nbar);
    alpha[i] = child_stream(spec.seed, kFieldAlpha, i).uniform(50.0, 100.0);
    // Safe (over-estimated) weak-convexity constant of the scalar Cauchy
    // loss along z_i.
    m[i] = z[i].squaredNorm();
  }
  auto oracle = std::make_shared<CauchyLossOracle>(std::move(alpha), std::move(y_obs), std::move(z));
  Eigen::VectorXd l_gt = Eigen::VectorXd::Zero(std::max(spec.B - 1, 0));
  return assemble(spec, std::move(dims), std::move(oracle), std::move(parts), std::move(m), std::move(l_gt));
}

GeneratedInstance gen_qpbc(const InstanceSpec& spec) {
  validate(spec);
  std::vector<int> dims(spec.B, 1);
  SharedParts parts = gen_shared(spec, dims);

  Rng rng_q = child_stream(spec.seed, kFieldQ, 0);
  Rng rng_d = child_stream(spec.seed, kFieldD, 0);
  Rng rng_r = child_stream(spec.seed, kFieldR, 0);
  const Eigen::MatrixXd q = random_orthonormal(spec.B, rng_q);
  const Eigen::VectorXd d = indefinite_diagonal(spec.B, rng_d);
  Eigen::MatrixXd pm = q.transpose() * d.asDiagonal() * q;
  pm = 0.5 * (pm + pm.transpose()).eval();
  const Eigen::VectorXd r = rng_r.normal_vector(spec.B);

  Eigen::VectorXd m(spec.B);
  Eigen::VectorXd l_gt(std::max(spec.B - 1, 0));
  for (int t = 0; t < spec.B; ++t) {
    m[t] = std::max(0.0, -pm(t, t));
    if (t < spec.B - 1) l_gt[t] = pm.row(t).tail(spec.B - 1 - t).norm();
  }
  auto oracle = std::make_shared<DenseQuadraticOracle>(pm, r);
  oracle->finalize_blocks(dims);
  return assemble(spec, std::move(dims), std::move(oracle), std::move(parts), std::move(m), std::move(l_gt));
}

GeneratedInstance generate_instance(const InstanceSpec& spec) {
  switch (spec.family) {
    case Family::Dqp: return gen_dqp(spec);
    case Family::Cauchy: return gen_cauchy(spec);
    case Family::Qpbc: return gen_qpbc(spec);
  }
  throw std::invalid_argument("generate_instance: unknown family");
}

}  // namespace admm
