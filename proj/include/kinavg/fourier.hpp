#pragma once

// Spectral representation of real-valued functions on the flat torus T^d
// (d = 1 or 2). A Spectrum stores complex Fourier coefficients c_k with the
// convention
//
//     g(x) = sum_k c_k exp(2*pi*i k.x),   k in [-n/2, n/2)^d,
//
// so that (g,h)_{L2_x} = sum_k c_k conj(h_k) exactly for band-limited g, h.
// Products are evaluated on a 2x padded collocation grid, which is exact
// whenever the bandwidths of the two factors sum to less than n/2.

#include <cassert>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace kinavg {

using cplx = std::complex<double>;

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Signed frequency of storage index m on an n-point mode set.
inline int freq_of(int m, int n) { return (m < n / 2 || n == 1) ? m : m - n; }

// Storage index of signed frequency k (must satisfy -n/2 <= k < n/2).
inline int index_of(int k, int n) { return k >= 0 ? k : k + n; }

void fft_pow2(std::vector<cplx>& a, bool inverse);

class Spectrum {
public:
    Spectrum() = default;
    Spectrum(int dim, int n) : dim_(dim), n_(n), c_(dim == 1 ? n : std::size_t(n) * n) {
        if (dim != 1 && dim != 2) throw std::invalid_argument("Spectrum: dim must be 1 or 2");
        if (!is_pow2(n)) throw std::invalid_argument("Spectrum: n must be a power of two");
    }

    int dim() const { return dim_; }
    int n() const { return n_; }
    std::size_t size() const { return c_.size(); }

    cplx& operator[](std::size_t i) { return c_[i]; }
    const cplx& operator[](std::size_t i) const { return c_[i]; }

    // Coefficient at signed frequency (k1) or (k1,k2).
    cplx& at(int k1) { return c_[index_of(k1, n_)]; }
    const cplx& at(int k1) const { return c_[index_of(k1, n_)]; }
    cplx& at(int k1, int k2) { return c_[std::size_t(index_of(k2, n_)) * n_ + index_of(k1, n_)]; }
    const cplx& at(int k1, int k2) const {
        return c_[std::size_t(index_of(k2, n_)) * n_ + index_of(k1, n_)];
    }

    const std::vector<cplx>& coeffs() const { return c_; }
    std::vector<cplx>& coeffs() { return c_; }

    // Iterate frequencies: calls fn(flat_index, k1, k2); k2 == 0 when dim == 1.
    template <class F>
    void for_each_mode(F&& fn) const {
        if (dim_ == 1) {
            for (int m = 0; m < n_; ++m) fn(std::size_t(m), freq_of(m, n_), 0);
        } else {
            std::size_t i = 0;
            for (int m2 = 0; m2 < n_; ++m2)
                for (int m1 = 0; m1 < n_; ++m1, ++i) fn(i, freq_of(m1, n_), freq_of(m2, n_));
        }
    }

    Spectrum& operator+=(const Spectrum& o);
    Spectrum& operator-=(const Spectrum& o);
    Spectrum& operator*=(double s);

    friend Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
    friend Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
    friend Spectrum operator*(Spectrum a, double s) { return a *= s; }
    friend Spectrum operator*(double s, Spectrum a) { return a *= s; }

private:
    int dim_ = 1;
    int n_ = 1;
    std::vector<cplx> c_;
};

// d/dx_axis, i.e. multiplication by 2*pi*i*k_axis.
Spectrum partial(const Spectrum& g, int axis);

// (a . grad) g for a constant vector a (a[1] ignored when dim == 1).
Spectrum grad_dot(const Spectrum& g, const double* a);

// Synthesis on a (pad*n)^dim collocation grid; values of the real field.
std::vector<double> to_grid(const Spectrum& g, int pad = 2);

// Analysis: project grid values (ng^dim points) onto an n-mode Spectrum.
Spectrum from_grid(const std::vector<double>& values, int ng, int dim, int n);

// Dealiased pointwise product, truncated to n modes.
Spectrum multiply(const Spectrum& a, const Spectrum& b);

// (a, b)_{L2_x} for real fields; exact Parseval sum.
double inner(const Spectrum& a, const Spectrum& b);

double l2_norm(const Spectrum& a);

// sup-norm estimates evaluated on a padded collocation grid (pad = 4).
double sup_norm(const Spectrum& a);
double sup_grad_norm(const Spectrum& a);

// Enforce conjugate symmetry c_{-k} = conj(c_k) (real-valued field).
void make_hermitian(Spectrum& a);

}  // namespace kinavg
