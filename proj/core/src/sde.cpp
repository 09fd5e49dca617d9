#include "meanrev/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <thread>

namespace meanrev::sde {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct Fnv1a {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001B3ULL;
        }
    }
    void add(double v) { bytes(&v, sizeof v); }
    void add(int v) { bytes(&v, sizeof v); }
};

// contiguous path ranges over a small worker pool; per-path work is
// independent, so the partition never changes results
template <typename Fn>
void parallel_paths(int paths, int threads, Fn&& fn) {
    int n = threads > 0 ? threads
                        : static_cast<int>(std::min(8u, std::max(1u, std::thread::hardware_concurrency())));
    n = std::min(n, paths);
    if (n <= 1) {
        fn(0, paths);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    const int chunk = (paths + n - 1) / n;
    for (int w = 0; w < n; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(paths, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

void fill_nan_tail(std::vector<double>& row, std::size_t from) {
    for (std::size_t j = from; j < row.size(); ++j) row[j] = kNaN;
}

void advance_path(Scheme scheme, const SdeParams& p, const AlphaField& alpha,
                  const std::vector<double>& dB, std::vector<double>& R,
                  std::uint8_t& excluded) {
    const int steps = static_cast<int>(dB.size());
    const double dt = p.dt();
    const double drift_shift = p.theta - 0.5 * p.sigma * p.sigma;
    excluded = 0;
    R[0] = p.r0;

    switch (scheme) {
        case Scheme::euler: {
            for (int j = 0; j < steps; ++j) {
                const double t = j * dt;
                const double r = R[static_cast<std::size_t>(j)];
                double a;
                if (alpha.needs_x()) {
                    if (!(r > 0.0) || !std::isfinite(r)) {
                        excluded = 1;
                        fill_nan_tail(R, static_cast<std::size_t>(j) + 1);
                        return;
                    }
                    a = alpha(std::log(r) - drift_shift * t, t);
                } else {
                    a = alpha(0.0, t);
                }
                const double next =
                    r + (p.theta + p.sigma * a) * r * dt + p.sigma * r * dB[static_cast<std::size_t>(j)];
                if (!std::isfinite(next)) {
                    excluded = 1;
                    fill_nan_tail(R, static_cast<std::size_t>(j) + 1);
                    return;
                }
                R[static_cast<std::size_t>(j) + 1] = next;
            }
            break;
        }
        case Scheme::log_euler: {
            double X = std::log(p.r0);
            for (int j = 0; j < steps; ++j) {
                const double t = j * dt;
                const double a = alpha(X, t);
                X += p.sigma * a * dt + p.sigma * dB[static_cast<std::size_t>(j)];
                const double next = std::exp(X + drift_shift * ((j + 1) * dt));
                if (!std::isfinite(next)) {
                    excluded = 1;
                    fill_nan_tail(R, static_cast<std::size_t>(j) + 1);
                    return;
                }
                R[static_cast<std::size_t>(j) + 1] = next;
            }
            break;
        }
        case Scheme::exact_q: {
            double B = 0.0;
            const double sign = p.r0 < 0.0 ? -1.0 : 1.0;
            const double mag = std::abs(p.r0);
            for (int j = 0; j < steps; ++j) {
                B += dB[static_cast<std::size_t>(j)];
                const double t = (j + 1) * dt;
                R[static_cast<std::size_t>(j) + 1] =
                    sign * mag * std::exp(p.sigma * B - 0.5 * p.sigma * p.sigma * t);
            }
            break;
        }
    }
}

PathEnsemble simulate(const SdeParams& p, const AlphaField& alpha, Scheme scheme, int threads) {
    p.validate();
    if (scheme != Scheme::exact_q) {
        if (alpha.horizon() < p.T - 1e-9 * std::max(1.0, p.T))
            throw std::invalid_argument("alpha: field horizon does not cover the simulation horizon T");
    }
    if (scheme == Scheme::log_euler && !(p.r0 > 0.0))
        throw std::invalid_argument("r0: log_euler scheme requires r0 > 0");

    PathEnsemble e;
    e.scheme = scheme;
    e.r0 = p.r0;
    e.dt = p.dt();
    e.increments.assign(static_cast<std::size_t>(p.paths),
                        std::vector<double>(static_cast<std::size_t>(p.steps)));
    e.R.assign(static_cast<std::size_t>(p.paths),
               std::vector<double>(static_cast<std::size_t>(p.steps) + 1));
    e.seeds.resize(static_cast<std::size_t>(p.paths));
    e.excluded.assign(static_cast<std::size_t>(p.paths), 0);

    const double sd = std::sqrt(p.dt());
    parallel_paths(p.paths, threads, [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            const std::uint64_t seed = path_seed(p.master_seed, i);
            e.seeds[static_cast<std::size_t>(i)] = seed;
            std::mt19937_64 eng(seed);
            std::normal_distribution<double> gauss(0.0, sd);
            auto& inc = e.increments[static_cast<std::size_t>(i)];
            for (double& v : inc) v = gauss(eng);
            advance_path(scheme, p, alpha, inc, e.R[static_cast<std::size_t>(i)],
                         e.excluded[static_cast<std::size_t>(i)]);
        }
    });
    return e;
}

}  // namespace

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::euler: return "euler";
        case Scheme::log_euler: return "log_euler";
        case Scheme::exact_q: return "exact_q";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "euler" || s == "em") return Scheme::euler;
    if (s == "log_euler" || s == "log-euler") return Scheme::log_euler;
    if (s == "exact_q" || s == "exact-q") return Scheme::exact_q;
    throw std::invalid_argument("scheme: expected euler, log_euler or exact_q, got '" + s + "'");
}

void SdeParams::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("sigma: must be finite and > 0");
    if (r0 == 0.0 || !std::isfinite(r0)) throw std::invalid_argument("r0: must be finite and != 0");
    if (!std::isfinite(theta)) throw std::invalid_argument("theta: must be finite");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("T: must be finite and > 0");
    if (steps < 1) throw std::invalid_argument("steps: must be >= 1");
    if (paths < 1) throw std::invalid_argument("paths: must be >= 1");
}

std::uint64_t path_seed(std::uint64_t master_seed, int path_index) {
    return splitmix64(master_seed + 0x9E3779B97F4A7C15ULL *
                                        (static_cast<std::uint64_t>(path_index) + 1));
}

int PathEnsemble::excluded_count() const {
    int n = 0;
    for (std::uint8_t f : excluded) n += f != 0;
    return n;
}

// ---------------------------------------------------------------------------
// AlphaField

AlphaField AlphaField::zero() { return AlphaField{}; }

AlphaField AlphaField::constant(double a) {
    AlphaField f;
    f.kind_ = Kind::constant;
    f.const_value_ = a;
    return f;
}

AlphaField AlphaField::from_trajectory(spectral::CoeffTrajectory traj) {
    if (traj.states.empty())
        throw std::invalid_argument("AlphaField: trajectory must contain at least one state");
    AlphaField f;
    f.kind_ = Kind::trajectory;
    f.reversed_ = traj.config.direction == spectral::Direction::well_posed_reverse;
    f.traj_ = std::make_shared<const spectral::CoeffTrajectory>(std::move(traj));
    return f;
}

AlphaField AlphaField::custom(std::function<double(double, double)> fn) {
    AlphaField f;
    f.kind_ = Kind::custom;
    f.fn_ = std::move(fn);
    return f;
}

std::size_t AlphaField::paper_index(int j) const {
    const int n = traj_->steps();
    return static_cast<std::size_t>(reversed_ ? n - j : j);
}

const spectral::FourierState& AlphaField::state_at(int j) const {
    if (kind_ != Kind::trajectory)
        throw std::logic_error("AlphaField: state_at requires a trajectory field");
    if (j < 0 || j > traj_->steps()) throw std::out_of_range("AlphaField: step index out of range");
    return traj_->states[paper_index(j)];
}

int AlphaField::trajectory_steps() const {
    if (kind_ != Kind::trajectory) throw std::logic_error("AlphaField: not a trajectory field");
    return traj_->steps();
}

double AlphaField::trajectory_delta() const {
    if (kind_ != Kind::trajectory) throw std::logic_error("AlphaField: not a trajectory field");
    return traj_->config.delta;
}

const spectral::SpectralConfig& AlphaField::trajectory_config() const {
    if (kind_ != Kind::trajectory) throw std::logic_error("AlphaField: not a trajectory field");
    return traj_->config;
}

double AlphaField::horizon() const {
    if (kind_ != Kind::trajectory) return std::numeric_limits<double>::infinity();
    return traj_->steps() * traj_->config.delta;
}

double AlphaField::operator()(double x, double t) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::constant: return const_value_;
        case Kind::custom: return fn_(x, t);
        case Kind::trajectory: break;
    }
    const int n = traj_->steps();
    const double delta = traj_->config.delta;
    int j = 0;
    double w = 0.0;
    if (n > 0) {
        const double u = std::clamp(t / delta, 0.0, static_cast<double>(n));
        j = std::min(static_cast<int>(u), n - 1);
        w = u - j;
    }
    const auto& lo = traj_->states[paper_index(j)];
    const auto& hi = traj_->states[paper_index(std::min(j + 1, n))];

    const int N = lo.order();
    const spectral::Complex rot = std::polar(1.0, x);
    spectral::Complex phase{1.0, 0.0};
    double val = (1.0 - w) * lo.coeff(0).real() + w * hi.coeff(0).real();
    for (int k = 1; k <= N; ++k) {
        phase *= rot;
        const spectral::Complex ck = (1.0 - w) * lo.coeff(k) + w * hi.coeff(k);
        val += 2.0 * (ck * phase).real();
    }
    return val;
}

std::uint64_t AlphaField::fingerprint() const {
    Fnv1a h;
    h.add(static_cast<int>(kind_));
    switch (kind_) {
        case Kind::zero: break;
        case Kind::constant: h.add(const_value_); break;
        case Kind::custom:
            // callables cannot be content-hashed; reconstruct_Z rejects them,
            // so no ZField ever carries this value
            h.add(-1);
            break;
        case Kind::trajectory: {
            h.add(traj_->config.N);
            h.add(traj_->config.n_steps);
            h.add(traj_->config.delta);
            h.add(traj_->config.sigma);
            h.add(static_cast<int>(traj_->config.direction));
            for (const auto& s : traj_->states)
                for (const auto& c : s.raw()) {
                    h.add(c.real());
                    h.add(c.imag());
                }
            break;
        }
    }
    return h.h;
}

// ---------------------------------------------------------------------------
// simulation entry points

PathEnsemble simulate_em(const SdeParams& params, const AlphaField& alpha, int threads) {
    return simulate(params, alpha, Scheme::euler, threads);
}

PathEnsemble simulate_log_euler(const SdeParams& params, const AlphaField& alpha, int threads) {
    return simulate(params, alpha, Scheme::log_euler, threads);
}

PathEnsemble simulate_exact_q(const SdeParams& params, int threads) {
    return simulate(params, AlphaField::zero(), Scheme::exact_q, threads);
}

PathEnsemble simulate_with_increments(const SdeParams& params, const AlphaField& alpha,
                                      Scheme scheme, std::vector<std::vector<double>> increments) {
    params.validate();
    if (static_cast<int>(increments.size()) != params.paths)
        throw std::invalid_argument("increments: row count must equal params.paths");
    for (const auto& row : increments)
        if (static_cast<int>(row.size()) != params.steps)
            throw std::invalid_argument("increments: each row must have params.steps entries");
    if (scheme == Scheme::log_euler && !(params.r0 > 0.0))
        throw std::invalid_argument("r0: log_euler scheme requires r0 > 0");

    PathEnsemble e;
    e.scheme = scheme;
    e.r0 = params.r0;
    e.dt = params.dt();
    e.increments = std::move(increments);
    e.R.assign(static_cast<std::size_t>(params.paths),
               std::vector<double>(static_cast<std::size_t>(params.steps) + 1));
    e.excluded.assign(static_cast<std::size_t>(params.paths), 0);
    for (int i = 0; i < params.paths; ++i)
        advance_path(scheme, params, alpha, e.increments[static_cast<std::size_t>(i)],
                     e.R[static_cast<std::size_t>(i)], e.excluded[static_cast<std::size_t>(i)]);
    return e;
}

PathEnsemble coarsen(const PathEnsemble& fine, const SdeParams& fine_params,
                     const AlphaField& alpha, int factor) {
    if (factor < 1 || fine_params.steps % factor != 0)
        throw std::invalid_argument("factor: must divide the fine step count");
    SdeParams coarse = fine_params;
    coarse.steps = fine_params.steps / factor;

    std::vector<std::vector<double>> inc(static_cast<std::size_t>(fine.paths()),
                                         std::vector<double>(static_cast<std::size_t>(coarse.steps)));
    for (int i = 0; i < fine.paths(); ++i)
        for (int j = 0; j < coarse.steps; ++j) {
            double s = 0.0;
            for (int q = 0; q < factor; ++q)
                s += fine.increments[static_cast<std::size_t>(i)][static_cast<std::size_t>(j * factor + q)];
            inc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
        }
    PathEnsemble e = simulate_with_increments(coarse, alpha, fine.scheme, std::move(inc));
    e.seeds = fine.seeds;
    return e;
}

// ---------------------------------------------------------------------------
// path functionals

std::vector<std::vector<double>> x_transform(const PathEnsemble& ensemble, const SdeParams& params) {
    const double drift_shift = params.theta - 0.5 * params.sigma * params.sigma;
    const double dt = ensemble.dt;
    std::vector<std::vector<double>> X(static_cast<std::size_t>(ensemble.paths()));
    for (int i = 0; i < ensemble.paths(); ++i) {
        const auto& R = ensemble.R[static_cast<std::size_t>(i)];
        auto& row = X[static_cast<std::size_t>(i)];
        row.resize(R.size());
        if (ensemble.excluded[static_cast<std::size_t>(i)]) {
            std::fill(row.begin(), row.end(), kNaN);
            continue;
        }
        for (std::size_t j = 0; j < R.size(); ++j) {
            const double r = R[j];
            if (!(r > 0.0))
                throw std::runtime_error(
                    "x_transform: non-positive R at path " + std::to_string(i) + ", step " +
                    std::to_string(j) +
                    " (sign preservation violated by the discretization; use log_euler or exact_q)");
            row[j] = std::log(r) - drift_shift * (static_cast<double>(j) * dt);
        }
    }
    return X;
}

std::vector<std::vector<double>> girsanov_log_density(const PathEnsemble& ensemble,
                                                      const SdeParams& params,
                                                      const AlphaField& alpha) {
    if (ensemble.increments.empty() ||
        static_cast<int>(ensemble.increments.size()) != ensemble.paths())
        throw std::invalid_argument("girsanov_log_density: ensemble carries no stored increments");

    std::vector<std::vector<double>> X;
    if (alpha.needs_x()) X = x_transform(ensemble, params);

    const double dt = ensemble.dt;
    std::vector<std::vector<double>> L(static_cast<std::size_t>(ensemble.paths()));
    for (int i = 0; i < ensemble.paths(); ++i) {
        const auto& inc = ensemble.increments[static_cast<std::size_t>(i)];
        auto& row = L[static_cast<std::size_t>(i)];
        row.resize(inc.size() + 1);
        if (ensemble.excluded[static_cast<std::size_t>(i)]) {
            std::fill(row.begin(), row.end(), kNaN);
            continue;
        }
        row[0] = 0.0;
        double acc = 0.0;
        for (std::size_t j = 0; j < inc.size(); ++j) {
            const double t = static_cast<double>(j) * dt;
            const double a = alpha.needs_x()
                                 ? alpha(X[static_cast<std::size_t>(i)][j], t)
                                 : alpha(0.0, t);
            acc -= 0.5 * a * a * dt + a * inc[j];
            row[j + 1] = acc;
        }
    }
    return L;
}

double sign_fraction(const PathEnsemble& ensemble) {
    long long good = 0, total = 0;
    for (int i = 0; i < ensemble.paths(); ++i) {
        if (ensemble.excluded[static_cast<std::size_t>(i)]) continue;
        for (double r : ensemble.R[static_cast<std::size_t>(i)]) {
            ++total;
            good += r * ensemble.r0 > 0.0;
        }
    }
    if (total == 0) return 1.0;  // vacuous
    return static_cast<double>(good) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// ZField

ZField reconstruct_Z(const AlphaField& alpha, double x0, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("sigma: must be finite and > 0");
    ZField z;
    z.x0_ = x0;
    z.sigma_ = sigma;
    z.alpha_fp_ = alpha.fingerprint();

    switch (alpha.kind()) {
        case AlphaField::Kind::zero:
            z.closed_form_ = true;
            z.const_a_ = 0.0;
            return z;
        case AlphaField::Kind::constant:
            z.closed_form_ = true;
            z.const_a_ = alpha.constant_value();
            return z;
        case AlphaField::Kind::custom:
            throw std::invalid_argument(
                "reconstruct_Z: custom fields carry no modal data; use a trajectory or constant");
        case AlphaField::Kind::trajectory: break;
    }

    const auto& cfg = alpha.trajectory_config();
    if (std::abs(cfg.sigma - sigma) > 1e-12 * std::max(1.0, std::abs(sigma)))
        throw std::invalid_argument(
            "sigma: does not match the sigma the alpha trajectory was solved with");

    const int n = alpha.trajectory_steps();
    const int N = cfg.N;
    z.delta_ = alpha.trajectory_delta();
    z.states_.reserve(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) z.states_.push_back(alpha.state_at(j));

    // integrand at the anchor: g = -(sigma/2) a_x(x0) - a(x0)^2 / 2,
    // both factors exact from the modes
    std::vector<double> g(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        const auto& s = z.states_[static_cast<std::size_t>(j)];
        double a = s.coeff(0).real();
        double ax = 0.0;
        for (int k = 1; k <= N; ++k) {
            const spectral::Complex phase = std::polar(1.0, k * x0);
            const spectral::Complex term = s.coeff(k) * phase;
            a += 2.0 * term.real();
            ax += 2.0 * (spectral::Complex{0.0, static_cast<double>(k)} * term).real();
        }
        g[static_cast<std::size_t>(j)] = -0.5 * sigma * ax - 0.5 * a * a;
    }
    z.time_integral_.resize(static_cast<std::size_t>(n) + 1);
    z.time_integral_[0] = 0.0;
    for (int j = 1; j <= n; ++j)
        z.time_integral_[static_cast<std::size_t>(j)] =
            z.time_integral_[static_cast<std::size_t>(j - 1)] +
            0.5 * z.delta_ * (g[static_cast<std::size_t>(j - 1)] + g[static_cast<std::size_t>(j)]);
    return z;
}

double burgers_consistency_residual(const AlphaField& alpha, int time_samples) {
    if (alpha.kind() == AlphaField::Kind::zero || alpha.kind() == AlphaField::Kind::constant)
        return 0.0;  // constants satisfy the equation identically
    if (alpha.kind() != AlphaField::Kind::trajectory)
        throw std::invalid_argument("burgers_consistency_residual: needs modal data");

    const auto& cfg = alpha.trajectory_config();
    const int n = alpha.trajectory_steps();
    if (n < 2) throw std::invalid_argument("burgers_consistency_residual: needs at least 2 steps");
    const double delta = alpha.trajectory_delta();
    const int stride =
        time_samples > 0 ? std::max(1, (n - 1) / time_samples) : 1;

    // residual modes: [ (c_{j+1} - c_{j-1}) / (2 delta) - rhs(c_j) ] / sigma,
    // where rhs is the continuous mode ODE of the ill-posed orientation
    double worst = 0.0;
    for (int j = 1; j < n; j += stride) {
        const auto& prev = alpha.state_at(j - 1);
        const auto& mid = alpha.state_at(j);
        const auto& next = alpha.state_at(j + 1);
        const spectral::FourierState rhs = spectral::spectral_rhs(mid, cfg);
        spectral::FourierState res(cfg.N, mid.time());
        for (int k = -cfg.N; k <= cfg.N; ++k) {
            const spectral::Complex dt_c =
                (next.coeff(k) - prev.coeff(k)) / (2.0 * delta);
            res.set_coeff(k, (dt_c - rhs.coeff(k)) / cfg.sigma);
        }
        worst = std::max(worst, spectral::synthesize(res, cfg.M).grid.max_abs());
    }
    return worst;
}

double ZField::horizon() const {
    if (closed_form_) return std::numeric_limits<double>::infinity();
    return static_cast<double>(static_cast<int>(states_.size()) - 1) * delta_;
}

double ZField::linear_coefficient(double t) const {
    if (closed_form_) return const_a_ / sigma_;
    const int n = static_cast<int>(states_.size()) - 1;
    if (n == 0) return states_[0].coeff(0).real() / sigma_;
    const double u = std::clamp(t / delta_, 0.0, static_cast<double>(n));
    const int j = std::min(static_cast<int>(u), n - 1);
    const double w = u - j;
    return ((1.0 - w) * states_[static_cast<std::size_t>(j)].coeff(0).real() +
            w * states_[static_cast<std::size_t>(j + 1)].coeff(0).real()) /
           sigma_;
}

double ZField::operator()(double x, double t) const {
    if (closed_form_) return const_a_ * (x - x0_) / sigma_ - 0.5 * const_a_ * const_a_ * t;

    const int n = static_cast<int>(states_.size()) - 1;
    int j = 0;
    double w = 0.0;
    if (n > 0) {
        const double u = std::clamp(t / delta_, 0.0, static_cast<double>(n));
        j = std::min(static_cast<int>(u), n - 1);
        w = u - j;
    }
    const auto& lo = states_[static_cast<std::size_t>(j)];
    const auto& hi = states_[static_cast<std::size_t>(std::min(j + 1, n))];
    const int N = lo.order();

    // integral_{x0}^{x} a(.,t): mean mode contributes an explicit linear
    // term, the rest integrates to (e^{ikx} - e^{ikx0}) / ik, valid for any
    // real x without wrapping
    const double a0 = (1.0 - w) * lo.coeff(0).real() + w * hi.coeff(0).real();
    double S = a0 * (x - x0_);
    for (int k = 1; k <= N; ++k) {
        const spectral::Complex ck = (1.0 - w) * lo.coeff(k) + w * hi.coeff(k);
        const spectral::Complex num =
            std::polar(1.0, k * x) - std::polar(1.0, k * x0_);
        const spectral::Complex ik{0.0, static_cast<double>(k)};
        S += 2.0 * (ck * num / ik).real();
    }
    const double C = (1.0 - w) * time_integral_[static_cast<std::size_t>(j)] +
                     w * time_integral_[static_cast<std::size_t>(std::min(j + 1, n))];
    return S / sigma_ + C;
}

spectral::GridFunction ZField::grid_at(double t, int M) const {
    spectral::GridFunction g;
    g.values.resize(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m)
        g.values[static_cast<std::size_t>(m)] = (*this)(spectral::grid_node(m, M), t);
    return g;
}

// ---------------------------------------------------------------------------
// residuals and summary

ResidualStats path_independence_residual(const PathEnsemble& ensemble, const ZField& Z,
                                         const SdeParams& params, const AlphaField& alpha) {
    if (Z.alpha_fingerprint() != alpha.fingerprint())
        throw std::invalid_argument("path_independence_residual: Z was built from a different alpha");
    if (std::abs(Z.sigma() - params.sigma) > 1e-12 * std::max(1.0, params.sigma))
        throw std::invalid_argument("path_independence_residual: Z was built with a different sigma");

    const auto L = girsanov_log_density(ensemble, params, alpha);
    const auto X = x_transform(ensemble, params);
    const int n = ensemble.steps();
    const double T = n * ensemble.dt;

    ResidualStats st;
    double sum = 0.0;
    for (int i = 0; i < ensemble.paths(); ++i) {
        if (ensemble.excluded[static_cast<std::size_t>(i)]) continue;
        const double r = std::abs(L[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)] +
                                  Z(X[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)], T) -
                                  Z(X[static_cast<std::size_t>(i)][0], 0.0));
        st.max = std::max(st.max, r);
        sum += r;
        ++st.count;
    }
    st.mean = st.count > 0 ? sum / st.count : 0.0;
    return st;
}

PairedResiduals path_independence_residual(const PathEnsemble& coarse,
                                           const SdeParams& coarse_params,
                                           const PathEnsemble& fine, const SdeParams& fine_params,
                                           const ZField& Z, const AlphaField& alpha) {
    PairedResiduals out;
    out.coarse = path_independence_residual(coarse, Z, coarse_params, alpha);
    out.fine = path_independence_residual(fine, Z, fine_params, alpha);
    out.mean_ratio = out.fine.mean > 0.0 ? out.coarse.mean / out.fine.mean
                                         : std::numeric_limits<double>::infinity();
    return out;
}

EnsembleSummary summarize(const PathEnsemble& ensemble, const SdeParams& params,
                          const AlphaField& alpha, const ZField* Z) {
    EnsembleSummary s;
    s.paths = ensemble.paths();
    s.steps = ensemble.steps();
    s.scheme = ensemble.scheme;
    s.excluded_paths = ensemble.excluded_count();
    s.sign_fraction = sign_fraction(ensemble);

    double sum = 0.0, sumsq = 0.0;
    int n = 0;
    for (int i = 0; i < ensemble.paths(); ++i) {
        if (ensemble.excluded[static_cast<std::size_t>(i)]) continue;
        const double rT = ensemble.R[static_cast<std::size_t>(i)].back();
        sum += rT;
        sumsq += rT * rT;
        ++n;
    }
    if (n > 0) {
        s.mean_RT = sum / n;
        const double var = std::max(0.0, (sumsq - sum * sum / n) / std::max(1, n - 1));
        s.se_RT = std::sqrt(var / n);
    }

    // the density/residual chain needs the X-transform; only attempt it when
    // every retained sample is strictly on the r0 side of zero
    bool transformable = n > 0;
    for (int i = 0; transformable && i < ensemble.paths(); ++i) {
        if (ensemble.excluded[static_cast<std::size_t>(i)]) continue;
        for (double r : ensemble.R[static_cast<std::size_t>(i)])
            if (!(r > 0.0)) {
                transformable = false;
                break;
            }
    }
    if (n > 0 && (transformable || !alpha.needs_x())) {
        const auto L = girsanov_log_density(ensemble, params, alpha);
        double dsum = 0.0;
        int dn = 0;
        for (int i = 0; i < ensemble.paths(); ++i) {
            if (ensemble.excluded[static_cast<std::size_t>(i)]) continue;
            dsum += std::exp(L[static_cast<std::size_t>(i)].back());
            ++dn;
        }
        s.has_density = dn > 0;
        s.density_mean = dn > 0 ? dsum / dn : 0.0;
    }
    if (transformable && Z != nullptr) {
        const ResidualStats st = path_independence_residual(ensemble, *Z, params, alpha);
        s.has_residuals = true;
        s.pi_residual_mean = st.mean;
        s.pi_residual_max = st.max;
    }
    return s;
}

}  // namespace meanrev::sde
