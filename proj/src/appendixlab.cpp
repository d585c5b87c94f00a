#include "gcfluct/appendixlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include <mpfr.h>

namespace gcfluct::appendixlab {

namespace {

// Minimal RAII wrapper around one mpfr number.
class Real {
 public:
  explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  Real(const Real&) = delete;
  Real& operator=(const Real&) = delete;
  Real(Real&& other) noexcept {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_swap(v_, other.v_);
  }
  Real& operator=(Real&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

// Full table P_1..P_n at a fixed precision. All rows are returned as doubles
// for the agreement check; mid-range rows can underflow double, which is
// harmless because agreement treats matching subnormal-or-zero pairs as equal.
std::vector<double> recursion_rows(double s, std::int64_t n, mpfr_prec_t prec) {
  const auto un = static_cast<std::size_t>(n);
  Real q(prec);
  mpfr_set_d(q.get(), -s, MPFR_RNDN);
  mpfr_exp(q.get(), q.get(), MPFR_RNDN);  // q = e^{-s}

  // q^m for every exponent m = k(j-k) that the recursion touches
  const std::size_t mmax = un * un / 4 + 1;
  std::vector<Real> qpow;
  qpow.reserve(mmax + 1);
  qpow.emplace_back(prec);
  mpfr_set_ui(qpow[0].get(), 1, MPFR_RNDN);
  for (std::size_t m = 1; m <= mmax; ++m) {
    qpow.emplace_back(prec);
    mpfr_mul(qpow[m].get(), qpow[m - 1].get(), q.get(), MPFR_RNDN);
  }

  std::vector<Real> p;
  p.reserve(un);
  p.emplace_back(prec);
  mpfr_set_ui(p[0].get(), 1, MPFR_RNDN);  // P_1 = 1

  Real acc(prec), binom(prec), term(prec);
  for (std::size_t j = 2; j <= un; ++j) {
    mpfr_set_ui(acc.get(), 0, MPFR_RNDN);
    mpfr_set_ui(binom.get(), 1, MPFR_RNDN);  // C(j-1, k-1) at k = 1
    for (std::size_t k = 1; k < j; ++k) {
      mpfr_mul(term.get(), binom.get(), p[k - 1].get(), MPFR_RNDN);
      mpfr_mul(term.get(), term.get(), qpow[k * (j - k)].get(), MPFR_RNDN);
      mpfr_add(acc.get(), acc.get(), term.get(), MPFR_RNDN);
      // C(j-1, k) = C(j-1, k-1) * (j-k) / k
      mpfr_mul_ui(binom.get(), binom.get(), static_cast<unsigned long>(j - k), MPFR_RNDN);
      mpfr_div_ui(binom.get(), binom.get(), static_cast<unsigned long>(k), MPFR_RNDN);
    }
    p.emplace_back(prec);
    mpfr_ui_sub(p[j - 1].get(), 1, acc.get(), MPFR_RNDN);
  }

  std::vector<double> rows(un);
  for (std::size_t j = 0; j < un; ++j) rows[j] = mpfr_get_d(p[j].get(), MPFR_RNDN);
  return rows;
}

bool rows_agree(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    double scale = std::max(std::abs(a[i]), std::abs(b[i]));
    if (scale < 1e-280) continue;  // both vanish at double scale
    if (std::abs(a[i] - b[i]) > 1e-12 * scale) return false;
  }
  return true;
}

}  // namespace

struct ConnectivityTable::Impl {
  double s = 0.0;
  mpfr_prec_t prec = 256;
  std::vector<double> rows;  // rows[j-1] = P_j(s)

  void ensure(std::int64_t n) {
    if (static_cast<std::size_t>(n) <= rows.size()) return;
    // grow geometrically so repeated small extensions do not rebuild each time
    std::int64_t target = std::max<std::int64_t>(n, static_cast<std::int64_t>(rows.size()) * 2);
    constexpr mpfr_prec_t kMaxPrec = 1 << 20;
    std::vector<double> current = recursion_rows(s, target, prec);
    for (;;) {
      if (prec * 2 > kMaxPrec) {
        throw std::runtime_error("ConnectivityTable: precision cap reached without agreement");
      }
      std::vector<double> refined = recursion_rows(s, target, prec * 2);
      prec *= 2;
      if (rows_agree(current, refined)) {
        rows = std::move(refined);
        return;
      }
      current = std::move(refined);
    }
  }
};

ConnectivityTable::ConnectivityTable(double s) : impl_(std::make_unique<Impl>()) {
  if (!std::isfinite(s) || s <= 0.0) {
    throw std::domain_error("ConnectivityTable: rate parameter s must be > 0");
  }
  impl_->s = s;
}

ConnectivityTable::~ConnectivityTable() = default;
ConnectivityTable::ConnectivityTable(ConnectivityTable&&) noexcept = default;
ConnectivityTable& ConnectivityTable::operator=(ConnectivityTable&&) noexcept = default;

double ConnectivityTable::prob(std::int64_t n) {
  if (n < 1) throw std::domain_error("ConnectivityTable::prob: n must be >= 1");
  impl_->ensure(n);
  return std::clamp(impl_->rows[static_cast<std::size_t>(n) - 1], 0.0, 1.0);
}

double ConnectivityTable::s() const { return impl_->s; }

double connectivity_prob(std::int64_t n, double s) {
  ConnectivityTable table(s);
  return table.prob(n);
}

double stepanov_asymptotic(std::int64_t n, double y) {
  if (n < 1) throw std::domain_error("stepanov_asymptotic: n must be >= 1");
  if (!(y >= 1.0) || !std::isfinite(y)) {
    throw std::domain_error("stepanov_asymptotic: y must be >= 1");
  }
  double prefactor = 1.0 - y / std::expm1(y);
  return prefactor * std::exp(static_cast<double>(n) * std::log1p(-std::exp(-y)));
}

double expected_components(std::int64_t n, std::int64_t k, double y) {
  if (k < 1 || k > n) throw std::domain_error("expected_components: need 1 <= k <= n");
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw std::domain_error("expected_components: y must be > 0");
  }
  double nd = static_cast<double>(n), kd = static_cast<double>(k);
  double log_binom = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
  double pk = connectivity_prob(k, y / nd);
  return std::exp(log_binom - y * kd * (1.0 - kd / nd)) * pk;
}

LDFunctions ld_functions(double x, double y) {
  if (!(x > 0.0) || !(x < 1.0) || !std::isfinite(x)) {
    throw std::domain_error("ld_functions: x must be in (0,1)");
  }
  if (!(y > 1.0) || !std::isfinite(y)) {
    throw std::domain_error("ld_functions: y must be > 1");
  }
  LDFunctions f;
  f.x = x;
  f.y = y;
  double one_minus_exy = -std::expm1(-x * y);  // 1 - e^{-xy}, in (0,1)
  f.delta = one_minus_exy - x;
  if (!(f.delta > -x) || !(f.delta < 1.0 - x)) {
    throw std::domain_error("ld_functions: delta outside (-x, 1-x)");
  }
  f.phi = -x * y * (1.0 - x) + x * std::log(one_minus_exy) - x * std::log(x) -
          (1.0 - x) * std::log1p(-x);
  f.psi = x * std::log1p(f.delta / x) + (1.0 - x) * std::log1p(-f.delta / (1.0 - x));
  return f;
}

TailReport tail_check(std::span<const double> samples, std::int64_t n, double gamma) {
  if (!(gamma > 0.0) || !(gamma < 0.5)) {
    throw std::domain_error("tail_check: gamma must be in (0, 0.5)");
  }
  if (n < 1) throw std::domain_error("tail_check: n must be >= 1");
  TailReport report;
  report.sample_size = samples.size();
  report.gamma = gamma;
  report.threshold = std::pow(static_cast<double>(n), gamma);
  for (double x : samples) {
    if (std::abs(x) > report.threshold) ++report.exceedances;
  }
  return report;
}

void write_sweep_csv(std::ostream& out, std::span<const std::int64_t> n_values,
                     std::span<const double> y_values, std::int64_t k_max) {
  out << "n,k,y,expected_components,stepanov_ratio\n";
  char buf[160];
  for (double y : y_values) {
    for (std::int64_t n : n_values) {
      ConnectivityTable table(y / static_cast<double>(n));
      double ratio = table.prob(n) / stepanov_asymptotic(n, y);
      for (std::int64_t k = 1; k <= std::min(k_max, n); ++k) {
        double nd = static_cast<double>(n), kd = static_cast<double>(k);
        double log_binom =
            std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
        double enk = std::exp(log_binom - y * kd * (1.0 - kd / nd)) * table.prob(k);
        std::snprintf(buf, sizeof(buf), "%lld,%lld,%.17g,%.17g,%.17g\n",
                      static_cast<long long>(n), static_cast<long long>(k), y, enk, ratio);
        out << buf;
      }
    }
  }
}

}  // namespace gcfluct::appendixlab
