#include "cascade/liouvillian.hpp"

namespace cascade {

using Matrix9c = Eigen::Matrix<num::cplx, 9, 9>;
using Matrix3d = Eigen::Matrix3d;

Matrix3d build_hamiltonian(const SystemParams& p) {
    validate(p);
    Matrix3d h = Matrix3d::Zero();
    h(0, 0) = p.delta;
    h(0, 1) = h(1, 0) = p.g1;
    h(1, 2) = h(2, 1) = p.g2;
    return h;
}

namespace {

// kron(X, Y)(3i+k, 3j+l) = X(i,j) Y(k,l); with column-major stacking this
// gives vec(A rho B) = kron(B^T, A) vec(rho).
Matrix9c kron(const Matrix3d& x, const Matrix3d& y) {
    Matrix9c m = Matrix9c::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    m(3 * i + k, 3 * j + l) = x(i, j) * y(k, l);
    return m;
}

} // namespace

Matrix9c build_generator(const SystemParams& p) {
    const Matrix3d h = build_hamiltonian(p);
    const Matrix3d id = Matrix3d::Identity();

    // commutator: d rho = -i (H rho - rho H)
    Matrix9c gen = num::cplx(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));

    // decay out of each basis state: -rate/2 * {P, rho}
    const double rates[3] = {p.gamma, p.kappa1, p.kappa2};
    for (int m = 0; m < 3; ++m) {
        Matrix3d proj = Matrix3d::Zero();
        proj(m, m) = 1.0;
        gen -= 0.5 * rates[m] * (kron(id, proj) + kron(proj, id));
    }

    // pure dephasing of the emitter: scrambles its coherences, keeps populations
    Matrix3d pe = Matrix3d::Zero();
    pe(0, 0) = 1.0;
    gen += p.gamma_star * kron(pe, pe);
    gen -= 0.5 * p.gamma_star * (kron(id, pe) + kron(pe, id));
    return gen;
}

LiouvillianDecomposition build_liouvillian(const SystemParams& p) {
    LiouvillianDecomposition dec;
    dec.generator = build_generator(p);
    try {
        dec.eig = num::eig_dense(dec.generator, 1e-9);
    } catch (const NumericsError& err) {
        throw DegenerateGenerator(std::string("build_liouvillian: ") + err.what());
    }
    return dec;
}

} // namespace cascade
