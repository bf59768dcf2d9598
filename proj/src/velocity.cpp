#include "kinavg/velocity.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kinavg {

namespace {

double norm2(const Vec2& v, int dim) {
    return dim == 1 ? std::abs(v[0]) : std::sqrt(v[0] * v[0] + v[1] * v[1]);
}

// Gauss nodes/weights for the even weight function w(v) = M(v) / (1 + v^2),
// M the standard Gaussian density. Quadrature nodes are eigenvalues of the
// Jacobi matrix (Golub-Welsch); recurrence coefficients come from a
// discretized Stieltjes procedure on a fine trapezoid grid. The rule is exact
// for polynomials against w up to degree 2n-1, so sum_j mu_j M_j = int M dv
// and sum_j mu_j M_j a_j^2 = int a^2 M dv hold to machine precision, with
// mu_j M_j = w_j (1 + v_j^2).
void gauss_rule_relativistic(int n, std::vector<double>& nodes, std::vector<double>& wts) {
    const double L = 12.0;
    const int grid_n = 9601;
    const double h = 2.0 * L / (grid_n - 1);
    std::vector<double> x(grid_n), m(grid_n);
    const double inv_sqrt2pi = 0.3989422804014326779399461;
    for (int i = 0; i < grid_n; ++i) {
        x[i] = -L + i * h;
        double w = inv_sqrt2pi * std::exp(-0.5 * x[i] * x[i]) / (1.0 + x[i] * x[i]);
        m[i] = w * h * ((i == 0 || i == grid_n - 1) ? 0.5 : 1.0);
    }

    // Stieltjes with orthonormal polynomials evaluated on the grid; all
    // alpha_k vanish because the weight is even.
    std::vector<double> beta(n, 0.0);
    double beta0 = 0.0;
    for (double v : m) beta0 += v;
    std::vector<double> pk(grid_n), pkm1(grid_n, 0.0), q(grid_n);
    const double inv_sqrt_b0 = 1.0 / std::sqrt(beta0);
    for (int i = 0; i < grid_n; ++i) pk[i] = inv_sqrt_b0;
    double sqrt_bprev = 0.0;
    for (int k = 1; k < n; ++k) {
        double bk = 0.0;
        for (int i = 0; i < grid_n; ++i) {
            q[i] = x[i] * pk[i] - sqrt_bprev * pkm1[i];
            bk += m[i] * q[i] * q[i];
        }
        beta[k] = bk;
        sqrt_bprev = std::sqrt(bk);
        const double inv = 1.0 / sqrt_bprev;
        for (int i = 0; i < grid_n; ++i) {
            pkm1[i] = pk[i];
            pk[i] = q[i] * inv;
        }
    }

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double off = std::sqrt(beta[k]);
        J(k - 1, k) = off;
        J(k, k - 1) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes.resize(n);
    wts.resize(n);
    for (int j = 0; j < n; ++j) {
        nodes[j] = es.eigenvalues()(j);
        const double q0 = es.eigenvectors()(0, j);
        wts[j] = beta0 * q0 * q0;
    }
    // Symmetrize node pairs exactly: v_{n-1-j} = -v_j, equal weights.
    for (int j = 0; j < n / 2; ++j) {
        const double v = 0.5 * (nodes[n - 1 - j] - nodes[j]);
        nodes[j] = -v;
        nodes[n - 1 - j] = v;
        const double w = 0.5 * (wts[j] + wts[n - 1 - j]);
        wts[j] = w;
        wts[n - 1 - j] = w;
    }
}

}  // namespace

double VelocityModel::a_sup() const {
    double s = 0.0;
    for (const auto& a : a_field) s = std::max(s, norm2(a, dim));
    return s;
}

double VelocityModel::b_sup() const {
    double s = 0.0;
    for (const auto& b : b_field) s = std::max(s, norm2(b, dim));
    return s;
}

std::array<double, 2> AveragedCoefficients::eigenvalues() const {
    const double tr = K[0][0] + K[1][1];
    const double det = K[0][0] * K[1][1] - K[0][1] * K[1][0];
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return {tr / 2.0 - disc, tr / 2.0 + disc};
}

VelocityModel make_discrete_model(int dim, Vec2 b_const) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("make_discrete_model: dim must be 1 or 2");
    VelocityModel m;
    m.dim = dim;
    const double maxw = dim == 1 ? 0.5 : 0.25;  // 2^-d
    if (dim == 1) {
        for (double v : {-1.0, 1.0}) {
            m.nodes.push_back({v, 0.0});
            m.weights.push_back(1.0);
            m.maxwellian.push_back(maxw);
            m.a_field.push_back({v, 0.0});
            m.b_field.push_back({b_const[0], 0.0});
        }
    } else {
        for (double v2 : {-1.0, 1.0})
            for (double v1 : {-1.0, 1.0}) {
                m.nodes.push_back({v1, v2});
                m.weights.push_back(1.0);
                m.maxwellian.push_back(maxw);
                m.a_field.push_back({v1, v2});
                m.b_field.push_back(b_const);
            }
    }
    return m;
}

VelocityModel make_continuous_model(int dim, int n_nodes) {
    if (dim != 1) throw std::invalid_argument("make_continuous_model: only dim = 1 is supported");
    if (n_nodes < 8 || n_nodes % 2 != 0)
        throw std::invalid_argument("make_continuous_model: n_nodes must be even and >= 8");
    std::vector<double> v, w;
    gauss_rule_relativistic(n_nodes, v, w);

    VelocityModel m;
    m.dim = 1;
    const double inv_sqrt2pi = 0.3989422804014326779399461;
    double mass = 0.0;
    for (int j = 0; j < n_nodes; ++j) mass += w[j] * (1.0 + v[j] * v[j]);
    const double rescale = 1.0 / mass;  // pin normalization exactly
    for (int j = 0; j < n_nodes; ++j) {
        const double M = inv_sqrt2pi * std::exp(-0.5 * v[j] * v[j]);
        m.nodes.push_back({v[j], 0.0});
        m.maxwellian.push_back(M);
        m.weights.push_back(rescale * w[j] * (1.0 + v[j] * v[j]) / M);
        m.a_field.push_back({v[j] / std::sqrt(1.0 + v[j] * v[j]), 0.0});
        m.b_field.push_back({0.0, 0.0});
    }
    check_model_invariants(m);
    return m;
}

void check_model_invariants(const VelocityModel& model) {
    const double tol = 1e-12;
    double mass = 0.0;
    Vec2 cent = {0.0, 0.0};
    for (int j = 0; j < model.n_nodes(); ++j) {
        if (!(model.weights[j] > 0.0)) throw std::runtime_error("model invariant: weight <= 0");
        if (!(model.maxwellian[j] > 0.0)) throw std::runtime_error("model invariant: Maxwellian <= 0");
        const double wm = model.weights[j] * model.maxwellian[j];
        mass += wm;
        cent[0] += wm * model.a_field[j][0];
        cent[1] += wm * model.a_field[j][1];
    }
    if (std::abs(mass - 1.0) > tol)
        throw std::runtime_error("model invariant: normalization deficit " + std::to_string(mass - 1.0));
    if (std::abs(cent[0]) > tol || std::abs(cent[1]) > tol)
        throw std::runtime_error("model invariant: centering deficit " +
                                 std::to_string(norm2(cent, model.dim)));
}

AveragedCoefficients averaged_coefficients(const VelocityModel& model) {
    AveragedCoefficients out;
    for (int j = 0; j < model.n_nodes(); ++j) {
        const double wm = model.weights[j] * model.maxwellian[j];
        const auto& a = model.a_field[j];
        const auto& b = model.b_field[j];
        out.K[0][0] += wm * a[0] * a[0];
        out.K[0][1] += wm * a[0] * a[1];
        out.K[1][0] += wm * a[1] * a[0];
        out.K[1][1] += wm * a[1] * a[1];
        out.J[0] += wm * b[0];
        out.J[1] += wm * b[1];
    }
    return out;
}

KineticField& KineticField::operator+=(const KineticField& o) {
    for (int j = 0; j < n_nodes(); ++j) node[j] += o.node[j];
    return *this;
}

KineticField& KineticField::operator-=(const KineticField& o) {
    for (int j = 0; j < n_nodes(); ++j) node[j] -= o.node[j];
    return *this;
}

KineticField& KineticField::operator*=(double s) {
    for (auto& g : node) g *= s;
    return *this;
}

Spectrum density(const KineticField& f, const VelocityModel& model) {
    if (f.n_nodes() != model.n_nodes())
        throw std::invalid_argument("density: node count mismatch");
    Spectrum rho(f.dim, f.n);
    for (int j = 0; j < f.n_nodes(); ++j) {
        const double mu = model.weights[j];
        for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += mu * f.node[j][i];
    }
    return rho;
}

KineticField bgk_apply(const KineticField& f, const VelocityModel& model) {
    Spectrum rho = density(f, model);
    KineticField out = f;
    for (int j = 0; j < f.n_nodes(); ++j) {
        const double M = model.maxwellian[j];
        for (std::size_t i = 0; i < rho.size(); ++i) out.node[j][i] = rho[i] * M - f.node[j][i];
    }
    return out;
}

KineticField equilibrium_field(const Spectrum& rho, const VelocityModel& model) {
    KineticField f(rho.dim(), rho.n(), model.n_nodes());
    for (int j = 0; j < model.n_nodes(); ++j) {
        const double M = model.maxwellian[j];
        for (std::size_t i = 0; i < rho.size(); ++i) f.node[j][i] = rho[i] * M;
    }
    return f;
}

double weighted_norm(const KineticField& f, const VelocityModel& model) {
    double s = 0.0;
    for (int j = 0; j < f.n_nodes(); ++j) {
        double nj = 0.0;
        for (std::size_t i = 0; i < f.node[j].size(); ++i) nj += std::norm(f.node[j][i]);
        s += model.weights[j] / model.maxwellian[j] * nj;
    }
    return std::sqrt(s);
}

}  // namespace kinavg
