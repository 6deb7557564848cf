#include <cfloat>
#include <algorithm>
#include <cmath>
#include <string>

#include <mpfr.h>

#include "fracsync/analysis.hpp"

namespace fracsync {
namespace {

// Largest working precision for the alternating series. Beyond this the
// leading terms are too large for the cancellation to be resolved in
// reasonable time (happens only for small q near |z| = 30).
constexpr double kMaxPrecisionBits = 8192.0;
// Terms past the peak are dropped once below this fraction of min(1, |sum|).
constexpr double kTermCutoff = 1e-17;

long term_limit(long peak_k) { return 10 * peak_k + 10000; }

class MpFloat {
public:
  explicit MpFloat(mpfr_prec_t bits) { mpfr_init2(v_, bits); }
  ~MpFloat() { mpfr_clear(v_); }
  MpFloat(const MpFloat&) = delete;
  MpFloat& operator=(const MpFloat&) = delete;

  mpfr_ptr get() { return v_; }

private:
  mpfr_t v_;
};

double log_term(double q, double log_abs_z, double k) { return k * log_abs_z - std::lgamma(q * k + 1.0); }

// Index and log-magnitude of the largest series term.
std::pair<long, double> peak_term(double q, double abs_z) {
  const double lz = std::log(abs_z);
  long k = 0;
  double best = 0.0;
  for (;;) {
    const double next = log_term(q, lz, static_cast<double>(k + 1));
    if (next < best) return {k, best};
    best = next;
    ++k;
  }
}

double sum_long_double(double q, double z, long peak_k) {
  const long double lz = std::log(static_cast<long double>(std::abs(z)));
  long double sum = 1.0L, comp = 0.0L;
  for (long k = 1; k < term_limit(peak_k); ++k) {
    const long double kd = static_cast<long double>(k);
    long double term = std::exp(kd * lz - std::lgamma(static_cast<long double>(q) * kd + 1.0L));
    if (z < 0.0 && (k % 2 == 1)) term = -term;
    // Neumaier compensated summation.
    const long double t = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
    if (k > peak_k && std::fabs(term) < kTermCutoff * std::min(1.0L, std::fabs(sum + comp))) break;
  }
  return static_cast<double>(sum + comp);
}

double sum_multiprecision(double q, double z, long peak_k, double peak_log) {
  const auto bits = static_cast<mpfr_prec_t>(96.0 + std::ceil(peak_log / std::log(2.0)));
  MpFloat sum(bits), power(bits), term(bits), arg(bits), gamma(bits), q_mp(bits), z_mp(bits);
  mpfr_set_d(q_mp.get(), q, MPFR_RNDN);
  mpfr_set_d(z_mp.get(), z, MPFR_RNDN);
  mpfr_set_ui(sum.get(), 1, MPFR_RNDN);
  mpfr_set_ui(power.get(), 1, MPFR_RNDN);
  for (long k = 1; k < term_limit(peak_k); ++k) {
    mpfr_mul(power.get(), power.get(), z_mp.get(), MPFR_RNDN);
    mpfr_mul_ui(arg.get(), q_mp.get(), static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_add_ui(arg.get(), arg.get(), 1, MPFR_RNDN);
    mpfr_gamma(gamma.get(), arg.get(), MPFR_RNDN);
    mpfr_div(term.get(), power.get(), gamma.get(), MPFR_RNDN);
    mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    if (k > peak_k) {
      const double magnitude = std::fabs(mpfr_get_d(term.get(), MPFR_RNDN));
      if (magnitude < kTermCutoff * std::min(1.0, std::fabs(mpfr_get_d(sum.get(), MPFR_RNDN)))) break;
    }
  }
  return mpfr_get_d(sum.get(), MPFR_RNDN);
}

}  // namespace

double mittag_leffler(double q, double z) {
  check_order(q);
  if (!std::isfinite(z) || std::abs(z) > kMittagLefflerMaxArg) {
    throw DomainExceeded("Mittag-Leffler argument must satisfy |z| <= 30, got " + std::to_string(z));
  }
  if (z == 0.0) return 1.0;

  // The largest term is about exp(|z|^(1/q)); reject before searching for it.
  const double peak_estimate = std::pow(std::abs(z), 1.0 / q);
  if (peak_estimate > kMaxPrecisionBits * std::log(2.0) || (z > 0.0 && peak_estimate > std::log(DBL_MAX))) {
    throw DomainExceeded("Mittag-Leffler series out of range for q = " + std::to_string(q) +
                         ", z = " + std::to_string(z));
  }
  const auto [peak_k, peak_log] = peak_term(q, std::abs(z));
  if (z > 0.0 || peak_log < std::log(10.0)) return sum_long_double(q, z, peak_k);
  return sum_multiprecision(q, z, peak_k, peak_log);
}

}  // namespace fracsync
