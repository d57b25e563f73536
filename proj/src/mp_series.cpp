#include "mp_series.hpp"

#include <mpfr.h>

namespace ksdiff::detail {
namespace {

class Mp {
public:
    explicit Mp(mpfr_prec_t prec, double x = 0.0) {
        mpfr_init2(v, prec);
        mpfr_set_d(v, x, MPFR_RNDN);
    }
    ~Mp() { mpfr_clear(v); }
    Mp(const Mp&) = delete;
    Mp& operator=(const Mp&) = delete;
    mpfr_t v;
};

}  // namespace

std::complex<double> ks_series_mpfr(std::complex<double> z, double a, double m, double l, int n_terms, int bits) {
    const mpfr_prec_t prec = bits;
    const auto R = MPFR_RNDN;
    Mp zr(prec, z.real()), zi(prec, z.imag());
    Mp pr(prec, 1.0), pi(prec, 0.0);  // c_n z^n
    Mp sr(prec, 0.0), si(prec, 0.0);
    Mp x(prec), xa(prec), lg(prec), lga(prec), ratio(prec), t1(prec), t2(prec), mm(prec, m), aa(prec, a), ll(prec, l);
    const bool chain = (m == 1.0);  // x_{n+1} = x_n + a, reuse log Gamma

    for (int n = 0; n < n_terms; ++n) {
        mpfr_add(sr.v, sr.v, pr.v, R);
        mpfr_add(si.v, si.v, pi.v, R);
        // x = 1 + a (n m + l)
        mpfr_mul_si(x.v, mm.v, n, R);
        mpfr_add(x.v, x.v, ll.v, R);
        mpfr_mul(x.v, x.v, aa.v, R);
        mpfr_add_ui(x.v, x.v, 1, R);
        mpfr_add(xa.v, x.v, aa.v, R);
        if (chain && n > 0)
            mpfr_set(lg.v, lga.v, R);
        else
            mpfr_lngamma(lg.v, x.v, R);
        mpfr_lngamma(lga.v, xa.v, R);
        mpfr_sub(ratio.v, lg.v, lga.v, R);
        mpfr_exp(ratio.v, ratio.v, R);
        // (pr + i pi) *= ratio * (zr + i zi)
        mpfr_mul(t1.v, pr.v, zr.v, R);
        mpfr_mul(t2.v, pi.v, zi.v, R);
        mpfr_sub(t1.v, t1.v, t2.v, R);
        mpfr_mul(t2.v, pr.v, zi.v, R);
        mpfr_fma(t2.v, pi.v, zr.v, t2.v, R);
        mpfr_mul(pr.v, t1.v, ratio.v, R);
        mpfr_mul(pi.v, t2.v, ratio.v, R);
    }
    return {mpfr_get_d(sr.v, R), mpfr_get_d(si.v, R)};
}

}  // namespace ksdiff::detail
