#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "deepesn/core.hpp"
#include "deepesn/random.hpp"
#include "deepesn/spectral.hpp"

namespace deepesn {

/// Shape and scaling of a reservoir stack. One value of each
/// hyperparameter is shared by every layer.
struct ReservoirConfig {
  Index n_layers = 1;
  Index units_per_layer = 100;
  Index input_dim = 1;
  double leaky_rate = 1.0;
  /// Target for rho((1 - a) I + a W_hat) of every layer.
  double target_spectral_radius = 0.9;
  /// Operator 2-norm of the input and inter-layer matrices.
  double input_scaling = 1.0;
  /// Fraction of nonzero recurrent weights.
  double connectivity = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    require(n_layers > 0, "ReservoirConfig: n_layers must be positive");
    require(units_per_layer > 0, "ReservoirConfig: units_per_layer must be positive");
    require(input_dim > 0, "ReservoirConfig: input_dim must be positive");
    require(leaky_rate > 0.0 && leaky_rate <= 1.0, "ReservoirConfig: leaky_rate must lie in (0, 1]");
    require(target_spectral_radius > 0.0 && target_spectral_radius < 1.0,
            "ReservoirConfig: target_spectral_radius must lie in (0, 1)");
    require(input_scaling > 0.0 && std::isfinite(input_scaling),
            "ReservoirConfig: input_scaling must be positive");
    require(connectivity > 0.0 && connectivity <= 1.0, "ReservoirConfig: connectivity must lie in (0, 1]");
  }
};

/// Square recurrent weight matrix held either densely or in CSR form.
template <typename Scalar>
class RecurrentMatrix {
 public:
  RecurrentMatrix() = default;
  explicit RecurrentMatrix(Matrix<Scalar> dense) : storage_(std::move(dense)) {
    require(this->dense().rows() == this->dense().cols(), "RecurrentMatrix: must be square");
  }
  explicit RecurrentMatrix(SparseMatrix<Scalar> sparse) : storage_(std::move(sparse)) {
    require(this->sparse().rows() == this->sparse().cols(), "RecurrentMatrix: must be square");
    std::get<SparseMatrix<Scalar>>(storage_).makeCompressed();
  }

  bool is_sparse() const { return std::holds_alternative<SparseMatrix<Scalar>>(storage_); }

  Index size() const {
    return std::visit([](const auto& m) { return m.rows(); }, storage_);
  }

  Index nonzeros() const {
    if (is_sparse()) return sparse().nonZeros();
    return (dense().array() != Scalar(0)).count();
  }

  const Matrix<Scalar>& dense() const { return std::get<Matrix<Scalar>>(storage_); }
  const SparseMatrix<Scalar>& sparse() const { return std::get<SparseMatrix<Scalar>>(storage_); }

  /// out = W * x
  template <typename In, typename Out>
  void multiply(const In& x, Out& out) const {
    std::visit([&](const auto& m) { out.noalias() = m * x; }, storage_);
  }

  Matrix<Scalar> to_dense() const {
    if (is_sparse()) return Matrix<Scalar>(sparse());
    return dense();
  }

  void scale(Scalar factor) {
    std::visit([factor](auto& m) { m *= factor; }, storage_);
  }

  /// Identical storage kind, pattern and bitwise-equal values.
  friend bool operator==(const RecurrentMatrix& lhs, const RecurrentMatrix& rhs) {
    if (lhs.is_sparse() != rhs.is_sparse() || lhs.size() != rhs.size()) return false;
    if (!lhs.is_sparse()) return lhs.dense() == rhs.dense();
    const auto& a = lhs.sparse();
    const auto& b = rhs.sparse();
    if (a.nonZeros() != b.nonZeros()) return false;
    return std::equal(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1, b.outerIndexPtr()) &&
           std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), b.innerIndexPtr()) &&
           std::equal(a.valuePtr(), a.valuePtr() + a.nonZeros(), b.valuePtr());
  }

 private:
  std::variant<Matrix<Scalar>, SparseMatrix<Scalar>> storage_{Matrix<Scalar>()};
};

/// One leaky-integrator tanh reservoir.
///
/// For the first layer `input_weights` is W_in (N_R x N_U); for higher
/// layers it holds the inter-layer weights from the layer below (N_R x N_R).
/// `ip_gain` and `ip_bias` are the intrinsic-plasticity parameters; they are
/// the identity (1, 0) until pre-training adapts them.
template <typename Scalar>
struct ReservoirLayer {
  RecurrentMatrix<Scalar> recurrent;
  Matrix<Scalar> input_weights;
  Scalar leaky_rate = Scalar(1);
  Vector<Scalar> ip_gain;
  Vector<Scalar> ip_bias;

  Index units() const { return input_weights.rows(); }
  Index input_dim() const { return input_weights.cols(); }
};

template <typename Scalar>
ReservoirLayer<Scalar> make_layer(RecurrentMatrix<Scalar> recurrent, Matrix<Scalar> input_weights,
                                  Scalar leaky_rate) {
  require(recurrent.size() == input_weights.rows(), "make_layer: recurrent and input row counts differ");
  const Index n = input_weights.rows();
  return ReservoirLayer<Scalar>{std::move(recurrent), std::move(input_weights), leaky_rate,
                                Vector<Scalar>::Ones(n), Vector<Scalar>::Zero(n)};
}

/// A stack of reservoirs; layer l > 0 is driven by the state of layer l - 1.
template <typename Scalar>
struct DeepReservoir {
  std::vector<ReservoirLayer<Scalar>> layers;

  Index n_layers() const { return static_cast<Index>(layers.size()); }
  Index input_dim() const { return layers.empty() ? 0 : layers.front().input_dim(); }

  /// Width of the concatenated global state.
  Index state_dim() const {
    Index total = 0;
    for (const auto& layer : layers) total += layer.units();
    return total;
  }

  void check_structure() const {
    require(!layers.empty(), "DeepReservoir: no layers");
    for (std::size_t l = 1; l < layers.size(); ++l)
      require(layers[l].input_dim() == layers[l - 1].units(),
              "DeepReservoir: inter-layer matrix width must equal the units of the layer below");
  }
};

template <typename Scalar>
struct DeepReservoirState {
  std::vector<Vector<Scalar>> layers;

  static DeepReservoirState zeros(const DeepReservoir<Scalar>& model) {
    DeepReservoirState state;
    state.layers.reserve(model.layers.size());
    for (const auto& layer : model.layers) state.layers.push_back(Vector<Scalar>::Zero(layer.units()));
    return state;
  }

  /// Concatenation x(t) = (x^(1)(t), ..., x^(N_L)(t)).
  Vector<Scalar> global() const {
    Index total = 0;
    for (const auto& x : layers) total += x.size();
    Vector<Scalar> out(total);
    Index offset = 0;
    for (const auto& x : layers) {
      out.segment(offset, x.size()) = x;
      offset += x.size();
    }
    return out;
  }
};

/// Scratch buffers for one layer update. After `advance_layer`,
/// `net` holds W_in u + W_hat x(t-1) and `activation` the tanh output.
template <typename Scalar>
struct LayerWorkspace {
  Vector<Scalar> net;
  Vector<Scalar> recurrent_term;
  Vector<Scalar> activation;
};

/// In-place state transition shared by every stepping entry point:
/// x <- (1 - a) x + a tanh(g .* (W_in drive + W_hat x) + b).
template <typename Scalar, typename Drive>
void advance_layer(const ReservoirLayer<Scalar>& layer, const Drive& drive, Vector<Scalar>& state,
                   LayerWorkspace<Scalar>& ws) {
  ws.net.noalias() = layer.input_weights * drive;
  layer.recurrent.multiply(state, ws.recurrent_term);
  ws.net += ws.recurrent_term;
  ws.activation = (layer.ip_gain.cwiseProduct(ws.net) + layer.ip_bias).array().tanh().matrix();
  const Scalar a = layer.leaky_rate;
  state = (Scalar(1) - a) * state + a * ws.activation;
}

namespace detail {

template <typename Scalar, typename DriveDerived>
Vector<Scalar> checked_step(const ReservoirLayer<Scalar>& layer, const Eigen::MatrixBase<DriveDerived>& drive,
                            const Vector<Scalar>& x_prev, const char* who) {
  require(drive.size() == layer.input_dim(), std::string(who) + ": drive dimension mismatch");
  require(x_prev.size() == layer.units(), std::string(who) + ": state dimension mismatch");
  require(layer.ip_gain.size() == layer.units() && layer.ip_bias.size() == layer.units(),
          std::string(who) + ": gain/bias dimension mismatch");
  require(x_prev.allFinite(), std::string(who) + ": previous state is not finite");
  Vector<Scalar> state = x_prev;
  LayerWorkspace<Scalar> ws;
  const Vector<Scalar> d = drive.template cast<Scalar>();
  advance_layer(layer, d, state, ws);
  return state;
}

}  // namespace detail

/// First-layer transition driven by the external input u(t).
template <typename Scalar, typename Derived>
Vector<Scalar> step_first_layer(const ReservoirLayer<Scalar>& layer, const Eigen::MatrixBase<Derived>& u,
                                const Vector<Scalar>& x_prev) {
  return detail::checked_step(layer, u, x_prev, "step_first_layer");
}

/// Transition of a layer l > 1 driven by x^(l-1)(t) of the same step.
template <typename Scalar, typename Derived>
Vector<Scalar> step_higher_layer(const ReservoirLayer<Scalar>& layer, const Eigen::MatrixBase<Derived>& x_below,
                                 const Vector<Scalar>& x_prev) {
  return detail::checked_step(layer, x_below, x_prev, "step_higher_layer");
}

/// One time step of the whole stack. Each layer above the first reads the
/// freshly updated state of the layer below.
template <typename Scalar, typename Derived>
DeepReservoirState<Scalar> step_deep(const DeepReservoir<Scalar>& model, const Eigen::MatrixBase<Derived>& u,
                                     const DeepReservoirState<Scalar>& state) {
  require(static_cast<Index>(state.layers.size()) == model.n_layers(), "step_deep: layer count mismatch");
  require(u.size() == model.input_dim(), "step_deep: input dimension mismatch");
  DeepReservoirState<Scalar> next;
  next.layers.reserve(state.layers.size());
  for (Index l = 0; l < model.n_layers(); ++l) {
    const auto& layer = model.layers[l];
    if (l == 0)
      next.layers.push_back(step_first_layer(layer, u, state.layers[0]));
    else
      next.layers.push_back(step_higher_layer(layer, next.layers[l - 1], state.layers[l]));
  }
  return next;
}

/// Drives the stack through `inputs` (one row per step) from the zero state
/// and returns the concatenated global states, first `washout` rows dropped.
template <typename Scalar, typename Derived>
RowMatrix<Scalar> run_sequence(const DeepReservoir<Scalar>& model, const Eigen::MatrixBase<Derived>& inputs,
                               Index washout = 0) {
  model.check_structure();
  require(inputs.rows() > 0, "run_sequence: empty input sequence");
  require(inputs.cols() == model.input_dim(), "run_sequence: input dimension mismatch");
  require(washout >= 0 && washout < inputs.rows(), "run_sequence: washout leaves no retained steps");

  const Index steps = inputs.rows();
  RowMatrix<Scalar> states(steps - washout, model.state_dim());
  DeepReservoirState<Scalar> state = DeepReservoirState<Scalar>::zeros(model);
  std::vector<LayerWorkspace<Scalar>> ws(model.layers.size());
  Vector<Scalar> u(model.input_dim());

  for (Index t = 0; t < steps; ++t) {
    u = inputs.row(t).transpose().template cast<Scalar>();
    advance_layer(model.layers[0], u, state.layers[0], ws[0]);
    for (Index l = 1; l < model.n_layers(); ++l)
      advance_layer(model.layers[l], state.layers[l - 1], state.layers[l], ws[l]);
    if (t >= washout) {
      Index offset = 0;
      for (const auto& x : state.layers) {
        states.row(t - washout).segment(offset, x.size()) = x.transpose();
        offset += x.size();
      }
    }
  }
  return states;
}

/// rho((1 - a) I + a W) for a recurrent matrix W and leaky rate a.
template <typename Scalar>
Scalar effective_spectral_radius(const RecurrentMatrix<Scalar>& w, Scalar leaky_rate,
                                 const SpectralOptions& opts = {}) {
  const Scalar a = leaky_rate;
  const Index n = w.size();
  Vector<Scalar> tmp(n);
  auto apply = [&](const Vector<Scalar>& x) -> Vector<Scalar> {
    w.multiply(x, tmp);
    return (Scalar(1) - a) * x + a * tmp;
  };
  auto densify = [&]() -> Matrix<Scalar> {
    Matrix<Scalar> m = a * w.to_dense();
    m.diagonal().array() += Scalar(1) - a;
    return m;
  };
  return spectral_radius_of<Scalar>(apply, densify, n, opts);
}

/// Options controlling recurrent rescaling during initialization.
struct ScalingOptions {
  /// Up to this size the full spectrum is computed once and the scale is
  /// solved in closed form; above it a root-finder drives power iteration.
  Index exact_spectrum_limit = 1024;
  SpectralOptions spectral{};
};

namespace detail {

/// Relative tolerance for matching the target radius.
template <typename Scalar>
Scalar radius_tolerance() {
  return std::max(Scalar(1e-10), Scalar(64) * std::numeric_limits<Scalar>::epsilon());
}

inline std::string unreachable_target_message(double target, double leak) {
  std::ostringstream os;
  os << "target spectral radius " << target << " is unreachable with leaky rate " << leak
     << ": rho((1-a)I + a*s*W) never equals the target for s > 0 (at s = 0 it is 1-a = " << (1.0 - leak)
     << ")";
  return os.str();
}

/// Smallest s > 0 with max_i |(1 - a) + a s lambda_i| = target, from the
/// full eigenvalue set of W. Each eigenvalue contributes the roots of
/// a^2 |l|^2 s^2 + 2 a (1 - a) Re(l) s + (1 - a)^2 - target^2 = 0.
template <typename Scalar>
Scalar scale_from_spectrum(const Vector<std::complex<Scalar>>& eig, Scalar a, Scalar target) {
  const Scalar one_minus_a = Scalar(1) - a;
  auto radius_at = [&](Scalar s) {
    Scalar r = 0;
    for (const auto& l : eig) r = std::max(r, std::abs(one_minus_a + a * s * l));
    return r;
  };
  std::vector<Scalar> candidates;
  for (const auto& l : eig) {
    const Scalar qa = a * a * std::norm(l);
    if (qa == Scalar(0)) continue;
    const Scalar qb = Scalar(2) * a * one_minus_a * l.real();
    const Scalar qc = one_minus_a * one_minus_a - target * target;
    const Scalar disc = qb * qb - Scalar(4) * qa * qc;
    if (disc < Scalar(0)) continue;
    const Scalar root = std::sqrt(disc);
    for (Scalar s : {(-qb - root) / (Scalar(2) * qa), (-qb + root) / (Scalar(2) * qa)})
      if (s > Scalar(0)) candidates.push_back(s);
  }
  std::sort(candidates.begin(), candidates.end());
  const Scalar slack = target * radius_tolerance<Scalar>();
  for (Scalar s : candidates)
    if (radius_at(s) <= target + slack) return s;
  throw InitializationError(unreachable_target_message(static_cast<double>(target), static_cast<double>(a)));
}

}  // namespace detail

/// Factor s such that rho((1 - a) I + a s W) equals `target`.
template <typename Scalar>
Scalar recurrent_scale_factor(const RecurrentMatrix<Scalar>& w, Scalar leaky_rate, Scalar target,
                              const ScalingOptions& opts = {}) {
  const Index n = w.size();
  const Scalar a = leaky_rate;

  if (n <= opts.exact_spectrum_limit) {
    Eigen::EigenSolver<Matrix<Scalar>> solver(w.to_dense(), /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericalError("recurrent_scale_factor: eigensolver failed");
    const Vector<std::complex<Scalar>> eig = solver.eigenvalues();
    if (eig.cwiseAbs().maxCoeff() == Scalar(0))
      throw InitializationError("recurrent matrix is nilpotent (spectral radius 0); cannot rescale");
    return detail::scale_from_spectrum<Scalar>(eig, a, target);
  }

  Vector<Scalar> warm;
  const Scalar base = spectral_radius_of<Scalar>([&](const Vector<Scalar>& x) -> Vector<Scalar> {
                                                   Vector<Scalar> y(n);
                                                   w.multiply(x, y);
                                                   return y;
                                                 },
                                                 [&]() { return w.to_dense(); }, n, opts.spectral, &warm);
  if (base == Scalar(0))
    throw InitializationError("recurrent matrix is nilpotent (spectral radius 0); cannot rescale");
  if (a == Scalar(1)) return target / base;
  if (Scalar(1) - a >= target)
    throw InitializationError(detail::unreachable_target_message(static_cast<double>(target),
                                                                 static_cast<double>(a)));

  // g(s) = rho_eff(s) - target is convex with g(0) = 1 - a - target < 0.
  Vector<Scalar> tmp(n);
  auto g = [&](Scalar s) {
    auto apply = [&](const Vector<Scalar>& x) -> Vector<Scalar> {
      w.multiply(x, tmp);
      return (Scalar(1) - a) * x + (a * s) * tmp;
    };
    auto densify = [&]() -> Matrix<Scalar> {
      Matrix<Scalar> m = (a * s) * w.to_dense();
      m.diagonal().array() += Scalar(1) - a;
      return m;
    };
    return spectral_radius_of<Scalar>(apply, densify, n, opts.spectral, &warm) - target;
  };
  Scalar lo = 0, g_lo = Scalar(1) - a - target;
  Scalar hi = (target + Scalar(1) - a) / (a * base), g_hi = g(hi);
  int side = 0;
  for (int it = 0; it < 100; ++it) {
    // Illinois variant of regula falsi.
    const Scalar s = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
    const Scalar gs = g(s);
    if (std::abs(gs) <= detail::radius_tolerance<Scalar>() * target) return s;
    if ((gs < 0) == (g_lo < 0)) {
      lo = s;
      g_lo = gs;
      if (side == -1) g_hi /= Scalar(2);
      side = -1;
    } else {
      hi = s;
      g_hi = gs;
      if (side == 1) g_lo /= Scalar(2);
      side = 1;
    }
  }
  throw NumericalError("recurrent_scale_factor: root search for the scale did not converge");
}

namespace detail {

/// `count` distinct cell indices of an n x n matrix, sorted (Floyd's method).
inline std::vector<std::uint64_t> sample_positions(Rng& rng, std::uint64_t cells, std::uint64_t count) {
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(count) * 2);
  for (std::uint64_t j = cells - count; j < cells; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Scalar>
RecurrentMatrix<Scalar> random_recurrent(Rng& rng, Index n, double connectivity) {
  if (connectivity >= 1.0) return RecurrentMatrix<Scalar>(rng.symmetric_matrix<Scalar>(n, n));
  const double expected = connectivity * static_cast<double>(n) * static_cast<double>(n);
  if (expected < 1.0)
    throw InitializationError("recurrent matrix would be empty: connectivity * N_R^2 < 1");
  const auto cells = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  const auto count = std::min<std::uint64_t>(cells, static_cast<std::uint64_t>(std::llround(expected)));
  const auto positions = sample_positions(rng, cells, count);

  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(positions.size());
  for (auto p : positions)
    triplets.emplace_back(static_cast<Index>(p / n), static_cast<Index>(p % n), static_cast<Scalar>(rng.symmetric()));
  SparseMatrix<Scalar> w(n, n);
  w.setFromTriplets(triplets.begin(), triplets.end());
  return RecurrentMatrix<Scalar>(std::move(w));
}

template <typename Scalar>
Matrix<Scalar> scaled_input_matrix(Rng& rng, Index rows, Index cols, Scalar sigma) {
  Matrix<Scalar> m = rng.symmetric_matrix<Scalar>(rows, cols);
  const Scalar norm = operator_norm(m);
  if (norm == Scalar(0)) throw InitializationError("input matrix drew all zeros");
  m *= sigma / norm;
  return m;
}

}  // namespace detail

/// Random initialization of a deep reservoir.
///
/// Every weight is drawn uniformly on [-1, 1]. Input and inter-layer matrices
/// are dense and rescaled to operator 2-norm `input_scaling`. Recurrent
/// matrices keep `connectivity * N_R^2` nonzeros at uniformly sampled
/// positions and are rescaled so rho((1 - a) I + a W_hat) equals the target.
/// Each layer draws from its own derived stream, so layer l does not depend
/// on how many layers come after it.
template <typename Scalar = double>
DeepReservoir<Scalar> init_deep_reservoir(const ReservoirConfig& config, const ScalingOptions& opts = {}) {
  config.validate();
  const Index n = config.units_per_layer;
  const auto sigma = static_cast<Scalar>(config.input_scaling);
  const auto leak = static_cast<Scalar>(config.leaky_rate);
  const auto target = static_cast<Scalar>(config.target_spectral_radius);

  DeepReservoir<Scalar> model;
  model.layers.reserve(static_cast<std::size_t>(config.n_layers));
  for (Index l = 0; l < config.n_layers; ++l) {
    const auto layer_id = static_cast<std::uint64_t>(l);
    Rng input_rng(derive_seed(config.seed, {layer_id, 0}));
    Rng recurrent_rng(derive_seed(config.seed, {layer_id, 1}));

    const Index in_dim = (l == 0) ? config.input_dim : n;
    Matrix<Scalar> input = detail::scaled_input_matrix<Scalar>(input_rng, n, in_dim, sigma);
    RecurrentMatrix<Scalar> recurrent = detail::random_recurrent<Scalar>(recurrent_rng, n, config.connectivity);
    recurrent.scale(recurrent_scale_factor(recurrent, leak, target, opts));
    model.layers.push_back(make_layer(std::move(recurrent), std::move(input), leak));
  }
  return model;
}

}  // namespace deepesn
