#pragma once

#include <cmath>
#include <vector>

#include "poweratom/errors.hpp"

namespace poweratom {

// Squared Wigner 3j symbol (l l' k; 0 0 0) via the log-factorial
// closed form; nonzero only when l + l' + k is even and the triangle
// rule holds.
inline double wigner3j000_sq(int l1, int l2, int l3) {
    const int J = l1 + l2 + l3;
    if (J % 2 != 0) return 0.0;
    if (l3 < std::abs(l1 - l2) || l3 > l1 + l2) return 0.0;
    const int g = J / 2;
    auto lf = [](int m) { return std::lgamma(static_cast<double>(m) + 1.0); };
    const double log_delta = lf(J - 2 * l1) + lf(J - 2 * l2) + lf(J - 2 * l3) -
                             lf(J + 1);
    const double log_w =
        lf(g) - lf(g - l1) - lf(g - l2) - lf(g - l3);
    return std::exp(log_delta + 2.0 * log_w);
}

// Angular coefficients of the radially reduced exchange energy:
//   A_{l l' k} = (2l+1)(2l'+1) (3j(l, l', k; 0,0,0))^2.
// A_{000} = 1, symmetric in l <-> l', zero outside the parity/triangle
// selection; k runs over |l-l'| .. l+l' with l+l'+k even, the table is
// exact (no truncation).
class MultipoleTable {
   public:
    explicit MultipoleTable(int L_max) : L_max_(L_max) {
        if (L_max < 0) throw ParameterError("MultipoleTable: L_max >= 0");
        k_max_ = 2 * L_max;
        coeffs_.assign(static_cast<std::size_t>((L_max + 1) * (L_max + 1) *
                                                (k_max_ + 1)),
                       0.0);
        for (int l = 0; l <= L_max; ++l)
            for (int lp = 0; lp <= L_max; ++lp)
                for (int k = 0; k <= k_max_; ++k)
                    coeffs_[index(l, lp, k)] =
                        (2 * l + 1) * (2 * lp + 1) * wigner3j000_sq(l, lp, k);
    }

    int L_max() const { return L_max_; }
    int k_max() const { return k_max_; }

    double A(int l, int lp, int k) const {
        if (l < 0 || lp < 0 || l > L_max_ || lp > L_max_)
            throw ParameterError("MultipoleTable: channel beyond L_max");
        if (k < 0 || k > k_max_) return 0.0;
        return coeffs_[index(l, lp, k)];
    }

   private:
    std::size_t index(int l, int lp, int k) const {
        return static_cast<std::size_t>((l * (L_max_ + 1) + lp) *
                                            (k_max_ + 1) +
                                        k);
    }

    int L_max_;
    int k_max_;
    std::vector<double> coeffs_;
};

}  // namespace poweratom
