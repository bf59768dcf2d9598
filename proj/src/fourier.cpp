#include "kinavg/fourier.hpp"

#include <algorithm>
#include <cmath>

namespace kinavg {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    assert(is_pow2(int(n)));
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? kTwoPi : -kTwoPi) / double(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

namespace {

// 2-d transform: rows then columns, in place; data is ng x ng row-major.
void fft2_pow2(std::vector<cplx>& a, int ng, bool inverse) {
    std::vector<cplx> tmp(ng);
    for (int r = 0; r < ng; ++r) {
        std::copy(a.begin() + std::size_t(r) * ng, a.begin() + std::size_t(r + 1) * ng, tmp.begin());
        fft_pow2(tmp, inverse);
        std::copy(tmp.begin(), tmp.end(), a.begin() + std::size_t(r) * ng);
    }
    for (int c = 0; c < ng; ++c) {
        for (int r = 0; r < ng; ++r) tmp[r] = a[std::size_t(r) * ng + c];
        fft_pow2(tmp, inverse);
        for (int r = 0; r < ng; ++r) a[std::size_t(r) * ng + c] = tmp[r];
    }
}

}  // namespace

Spectrum& Spectrum::operator+=(const Spectrum& o) {
    assert(dim_ == o.dim_ && n_ == o.n_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Spectrum& Spectrum::operator-=(const Spectrum& o) {
    assert(dim_ == o.dim_ && n_ == o.n_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Spectrum& Spectrum::operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
}

Spectrum partial(const Spectrum& g, int axis) {
    Spectrum out = g;
    out.for_each_mode([&](std::size_t i, int k1, int k2) {
        const int k = axis == 0 ? k1 : k2;
        out[i] = g[i] * cplx(0.0, kTwoPi * k);
    });
    return out;
}

Spectrum grad_dot(const Spectrum& g, const double* a) {
    Spectrum out = g;
    out.for_each_mode([&](std::size_t i, int k1, int k2) {
        const double ka = g.dim() == 1 ? a[0] * k1 : a[0] * k1 + a[1] * k2;
        out[i] = g[i] * cplx(0.0, kTwoPi * ka);
    });
    return out;
}

std::vector<double> to_grid(const Spectrum& g, int pad) {
    const int n = g.n();
    const int ng = pad * n;
    if (g.dim() == 1) {
        std::vector<cplx> big(ng, cplx(0, 0));
        g.for_each_mode([&](std::size_t i, int k1, int) { big[index_of(k1, ng)] = g[i]; });
        fft_pow2(big, true);
        std::vector<double> out(ng);
        for (int m = 0; m < ng; ++m) out[m] = big[m].real();
        return out;
    }
    std::vector<cplx> big(std::size_t(ng) * ng, cplx(0, 0));
    g.for_each_mode([&](std::size_t i, int k1, int k2) {
        big[std::size_t(index_of(k2, ng)) * ng + index_of(k1, ng)] = g[i];
    });
    fft2_pow2(big, ng, true);
    std::vector<double> out(big.size());
    for (std::size_t i = 0; i < big.size(); ++i) out[i] = big[i].real();
    return out;
}

Spectrum from_grid(const std::vector<double>& values, int ng, int dim, int n) {
    if (dim == 1) {
        assert(int(values.size()) == ng);
        std::vector<cplx> a(values.begin(), values.end());
        fft_pow2(a, false);
        Spectrum out(1, n);
        const double scale = 1.0 / ng;
        out.for_each_mode([&](std::size_t i, int k1, int) { out[i] = a[index_of(k1, ng)] * scale; });
        return out;
    }
    assert(values.size() == std::size_t(ng) * ng);
    std::vector<cplx> a(values.begin(), values.end());
    fft2_pow2(a, ng, false);
    Spectrum out(2, n);
    const double scale = 1.0 / (double(ng) * ng);
    out.for_each_mode([&](std::size_t i, int k1, int k2) {
        out[i] = a[std::size_t(index_of(k2, ng)) * ng + index_of(k1, ng)] * scale;
    });
    return out;
}

Spectrum multiply(const Spectrum& a, const Spectrum& b) {
    assert(a.dim() == b.dim() && a.n() == b.n());
    const int ng = 2 * a.n();
    std::vector<double> ga = to_grid(a, 2);
    std::vector<double> gb = to_grid(b, 2);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= gb[i];
    return from_grid(ga, ng, a.dim(), a.n());
}

double inner(const Spectrum& a, const Spectrum& b) {
    assert(a.dim() == b.dim() && a.n() == b.n());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return s;
}

double l2_norm(const Spectrum& a) { return std::sqrt(inner(a, a)); }

double sup_norm(const Spectrum& a) {
    std::vector<double> g = to_grid(a, 4);
    double m = 0.0;
    for (double v : g) m = std::max(m, std::abs(v));
    return m;
}

double sup_grad_norm(const Spectrum& a) {
    if (a.dim() == 1) {
        return sup_norm(partial(a, 0));
    }
    std::vector<double> gx = to_grid(partial(a, 0), 4);
    std::vector<double> gy = to_grid(partial(a, 1), 4);
    double m = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i)
        m = std::max(m, std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]));
    return m;
}

void make_hermitian(Spectrum& a) {
    const int n = a.n();
    if (a.dim() == 1) {
        for (int k = 1; k < n / 2; ++k) {
            cplx avg = 0.5 * (a.at(k) + std::conj(a.at(-k)));
            a.at(k) = avg;
            a.at(-k) = std::conj(avg);
        }
        a.at(0) = cplx(a.at(0).real(), 0.0);
        a.at(-n / 2) = cplx(a.at(-n / 2).real(), 0.0);
        return;
    }
    // pair (k1,k2) with (-k1,-k2); self-paired modes made real
    for (int m2 = 0; m2 < n; ++m2) {
        for (int m1 = 0; m1 < n; ++m1) {
            const int k1 = freq_of(m1, n), k2 = freq_of(m2, n);
            if (k1 == -n / 2 || k2 == -n / 2) continue;  // handled below
            if (k1 < 0 || (k1 == 0 && k2 < 0)) continue; // visit each pair once
            if (k1 == 0 && k2 == 0) {
                a.at(0, 0) = cplx(a.at(0, 0).real(), 0.0);
                continue;
            }
            cplx avg = 0.5 * (a.at(k1, k2) + std::conj(a.at(-k1, -k2)));
            a.at(k1, k2) = avg;
            a.at(-k1, -k2) = std::conj(avg);
        }
    }
    // Nyquist rows/columns have no conjugate partner in the mode set; zero them
    // so the represented field is exactly real.
    for (int m = 0; m < n; ++m) {
        a.at(-n / 2, freq_of(m, n)) = cplx(0, 0);
        a.at(freq_of(m, n), -n / 2) = cplx(0, 0);
    }
}

}  // namespace kinavg
