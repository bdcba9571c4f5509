#include "cascade/rate_model.hpp"

#include <algorithm>
#include <cmath>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

double lorentzian(double delta, double width) {
    const double x = 2.0 * delta / width;
    return 1.0 / (1.0 + x * x);
}

void finalize(RateModel& m) {
    m.matrix << -m.gamma - m.r1, m.r1, 0.0,
        m.r1, -m.kappa1 - m.r1 - m.r2, m.r2,
        0.0, m.r2, -m.kappa2 - m.r2;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.matrix);
    if (es.info() != Eigen::Success) throw NonConvergence("rate matrix eigensolve failed");
    Eigen::Vector3d ev = es.eigenvalues();
    std::array<double, 3> order{std::abs(ev(0)), std::abs(ev(1)), std::abs(ev(2))};
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return order[a] < order[b]; });
    for (int k = 0; k < 3; ++k) m.roots[k] = ev(idx[k]);

    const double k1 = m.kappa1, k2 = m.kappa2, r2 = m.r2;
    m.eta_closed = k2 * r2 / (k1 * (k2 + r2) + k2 * r2);
    const double parallel = k2 * r2 / (k2 + r2);
    m.i_closed = (k1 / 2.0 + parallel / 2.0) / (k1 / 2.0 + k2 + 1.5 * r2);
    m.pb_decay_rate = (k1 * (k2 + r2) + k2 * r2) / (k1 + 2.0 * k2 + 3.0 * r2);
}

}  // namespace

double transfer_rate_r1(const SystemParams& p) {
    validate(p);
    const double width = p.total_linewidth() + p.kappa1;
    return 4.0 * p.g1 * p.g1 / width * lorentzian(p.delta, width);
}

double transfer_rate_r2(const SystemParams& p, double r1) {
    validate(p);
    if (r1 < 0.0) throw InvalidParams("r1 must be nonnegative");
    return 4.0 * p.g2 * p.g2 / (r1 + p.kappa1 + p.kappa2);
}

RateModel build_rate_model(const SystemParams& p) {
    validate(p);
    RateModel m;
    m.r1 = transfer_rate_r1(p);
    m.r2 = transfer_rate_r2(p, m.r1);
    m.gamma = p.gamma;
    m.kappa1 = p.kappa1;
    m.kappa2 = p.kappa2;
    finalize(m);
    return m;
}

RateModel build_rate_model_from_rates(double r1, double r2, double gamma, double kappa1,
                                      double kappa2) {
    if (!(r1 >= 0.0) || !(r2 >= 0.0) || !(gamma >= 0.0))
        throw InvalidParams("rates must be nonnegative");
    if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) throw InvalidParams("cavity leaks must be positive");
    RateModel m;
    m.r1 = r1;
    m.r2 = r2;
    m.gamma = gamma;
    m.kappa1 = kappa1;
    m.kappa2 = kappa2;
    finalize(m);
    return m;
}

RateTrace rate_propagate(const RateModel& m, const std::vector<double>& t_grid) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 0.0 || (i > 0 && t_grid[i] <= t_grid[i - 1]))
            throw InvalidParams("time grid must be increasing and nonnegative");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.matrix);
    if (es.info() != Eigen::Success) throw NonConvergence("rate matrix eigensolve failed");
    const Eigen::Matrix3d v = es.eigenvectors();
    const Eigen::Vector3d lam = es.eigenvalues();
    const Eigen::Vector3d w = v.transpose() * Eigen::Vector3d(1.0, 0.0, 0.0);

    RateTrace tr;
    tr.times = t_grid;
    tr.p_e.reserve(t_grid.size());
    tr.p_a.reserve(t_grid.size());
    tr.p_b.reserve(t_grid.size());
    for (double t : t_grid) {
        Eigen::Vector3d pop =
            v * (lam.array() * t).exp().matrix().cwiseProduct(w);
        tr.p_e.push_back(pop(0));
        tr.p_a.push_back(pop(1));
        tr.p_b.push_back(pop(2));
    }
    if (!t_grid.empty() && t_grid.front() == 0.0) {
        tr.p_e.front() = 1.0;
        tr.p_a.front() = 0.0;
        tr.p_b.front() = 0.0;
    }
    return tr;
}

RateIntegrals rate_integrals(const RateModel& m) {
    if (m.gamma <= 0.0 && m.r1 <= 0.0)
        throw InvalidParams("excitation never leaves the emitter; integrals diverge");
    Eigen::LDLT<Eigen::Matrix3d> ldlt(-m.matrix);
    if (ldlt.info() != Eigen::Success) throw NumericsError("rate matrix is singular");
    const Eigen::Vector3d x = ldlt.solve(Eigen::Vector3d(1.0, 0.0, 0.0));
    return RateIntegrals{x(0), x(1), x(2)};
}

double efficiency_closed(const SystemParams& p) {
    const double r1 = transfer_rate_r1(p);
    const double r2 = transfer_rate_r2(p, r1);
    return p.kappa2 * r2 / (p.kappa1 * (p.kappa2 + r2) + p.kappa2 * r2);
}

double indistinguishability_closed(const SystemParams& p) {
    const double r1 = transfer_rate_r1(p);
    const double r2 = transfer_rate_r2(p, r1);
    const double parallel = p.kappa2 * r2 / (p.kappa2 + r2);
    return (p.kappa1 / 2.0 + parallel / 2.0) / (p.kappa1 / 2.0 + p.kappa2 + 1.5 * r2);
}

std::array<std::complex<double>, 3> characteristic_roots(const RateModel& m) {
    return m.roots;
}

EffectiveEmitter effective_emitter(const RateModel& m) {
    EffectiveEmitter eff;
    eff.matrix << -(m.kappa1 + m.r2) / 2.0, m.r2 / 2.0,
        m.r2, -(m.kappa2 + m.r2);
    eff.pb_decay_rate = m.pb_decay_rate;
    eff.valid = 2.0 * m.r1 >= 5.0 * (m.kappa1 + m.r2);
    return eff;
}

Eigen::Matrix3d effective_transform_exact(const RateModel& m) {
    Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
    if (m.r1 <= 0.0) return t;
    const double a = m.kappa1 + m.r2;
    const double s = std::hypot(a, 2.0 * m.r1);
    t(0, 0) = 1.0;
    t(0, 1) = 1.0;
    // 2 r1/(a-s) rewritten cancellation-free using s^2 - a^2 = 4 r1^2.
    t(1, 0) = -(a + s) / (2.0 * m.r1);
    t(1, 1) = 2.0 * m.r1 / (a + s);
    return t;
}

RegimeFlags classify_regime(const RateModel& m) {
    RegimeFlags f;
    f.reg1 = m.r2 < m.kappa1 && m.kappa2 < m.kappa1;
    f.reg2 = m.r2 > m.kappa1 && m.kappa2 > m.kappa1;
    f.effective_emitter_valid = 2.0 * m.r1 >= 5.0 * (m.kappa1 + m.r2);
    return f;
}

double single_cavity_transfer_rate(const SystemParams& p) {
    return transfer_rate_r1(p);
}

double efficiency_closed_single(const SystemParams& p) {
    const double r = single_cavity_transfer_rate(p);
    const double k = p.kappa1;
    return k * r / (p.gamma * (k + r) + k * r);
}

double indistinguishability_closed_single(const SystemParams& p) {
    const double r = single_cavity_transfer_rate(p);
    const double k = p.kappa1;
    return (p.gamma + k * r / (k + r)) / (p.gamma + k + 2.0 * r);
}

}  // namespace cascade
