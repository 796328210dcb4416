#include "subwalk/green.hpp"

#include "subwalk/errors.hpp"
#include "subwalk/numeric.hpp"
#include "subwalk/walk_kernel.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace subwalk {

double asymptotic_constant(int d, double alpha) {
  if (!(alpha > 0.0 && alpha < d)) throw DomainError("asymptotic constant needs 0 < alpha < d");
  const double dd = d;
  return std::pow(dd / 2.0, alpha / 2.0) * std::pow(kPi, -dd / 2.0) * std::tgamma((dd - alpha) / 2.0) /
         std::tgamma(alpha / 2.0);
}

double riesz_constant(int d, double alpha) {
  if (!(alpha > 0.0 && alpha < d)) throw DomainError("Riesz constant needs 0 < alpha < d");
  const double dd = d;
  return std::tgamma((dd - alpha) / 2.0) / (std::pow(2.0, alpha) * std::pow(kPi, dd / 2.0) * std::tgamma(alpha / 2.0));
}

namespace {

double safe_alpha(const BernsteinSpec& spec, int d) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  const double a = spec.alpha();
  if (a >= d) {
    std::ostringstream os;
    os << "recurrent regime: alpha = " << a << " >= d = " << d << "; the Green function is infinite";
    throw DomainError(os.str());
  }
  return a;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

GreenEvaluator::GreenEvaluator(int d, BernsteinSpec spec, GreenOptions options)
    : d_(d), spec_(std::move(spec)), opts_(options), alpha_(safe_alpha(spec_, d)) {
  if (opts_.exact_steps < 2) throw DomainError("exact_steps must be >= 2");
  if (!(opts_.split > 1.0)) throw DomainError("split constant A must exceed 1");
  const std::int64_t K = opts_.exact_steps;
  const double a = alpha_ / 2.0;

  std::int64_t limit = 16 * K;
  if (spec_.is_power()) {
    renewal_ = renewal_closed_form(alpha_, static_cast<std::size_t>(limit));
  } else {
    if (std::holds_alternative<LogPower>(spec_.family()))
      limit = std::min<std::int64_t>(limit, static_cast<std::int64_t>(kSeriesMaxTerms));
    auto coeffs = coefficients(spec_, static_cast<std::size_t>(limit));
    renewal_ = renewal_sequence(coeffs, static_cast<std::size_t>(limit));
    // single-term model amp t^{a-1} l(t) fitted on the last decade
    CompensatedSum num, den;
    auto shape = [&](double t) {
      return std::pow(t, a - 1.0) * (spec_.has_slowly_varying() ? spec_.slowly_varying(t) : 1.0);
    };
    for (std::int64_t k = limit / 10 + 1; k <= limit; ++k) {
      const double f = shape(static_cast<double>(k));
      num.add(renewal_[static_cast<std::size_t>(k)] * f);
      den.add(f * f);
    }
    fit_amp_ = num.value() / den.value();
    for (std::int64_t k = limit / 10 + 1; k <= limit; ++k) {
      const double c = renewal_[static_cast<std::size_t>(k)];
      model_rel_err_ = std::max(model_rel_err_, std::abs(c - fit_amp_ * shape(static_cast<double>(k))) / c);
    }
  }
  renewal_limit_ = limit;
  if (renewal_limit_ < K) throw DomainError("renewal range shorter than the exact zone");
  compute_exact_part();
}

GreenEvaluator::~GreenEvaluator() = default;

std::string GreenEvaluator::cache_name() const {
  std::ostringstream os;
  os << "green_d" << d_ << "_K" << opts_.exact_steps << "_" << std::hex << fnv1a(spec_.describe()) << ".bin";
  return os.str();
}

namespace {
constexpr char kGreenMagic[4] = {'S', 'W', 'G', 'E'};
constexpr std::uint32_t kGreenVersion = 1;
}  // namespace

void GreenEvaluator::save_cache(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  std::ofstream f(tmp, std::ios::binary);
  if (!f) return;
  const std::string desc = spec_.describe();
  const std::uint64_t dl = desc.size(), n = exact_.size();
  const std::int32_t hdr[2] = {d_, opts_.exact_steps};
  f.write(kGreenMagic, 4);
  f.write(reinterpret_cast<const char*>(&kGreenVersion), sizeof kGreenVersion);
  f.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
  f.write(reinterpret_cast<const char*>(&dl), sizeof dl);
  f.write(desc.data(), static_cast<std::streamsize>(dl));
  f.write(reinterpret_cast<const char*>(&c0_), sizeof c0_);
  f.write(reinterpret_cast<const char*>(&c1_), sizeof c1_);
  f.write(reinterpret_cast<const char*>(&n), sizeof n);
  f.write(reinterpret_cast<const char*>(exact_.data()), static_cast<std::streamsize>(n * sizeof(double)));
  f.close();
  if (f) {
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
  }
}

bool GreenEvaluator::load_cache(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  char magic[4];
  std::uint32_t version = 0;
  std::int32_t hdr[2];
  std::uint64_t dl = 0, n = 0;
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(&version), sizeof version);
  f.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  f.read(reinterpret_cast<char*>(&dl), sizeof dl);
  if (!f || std::memcmp(magic, kGreenMagic, 4) != 0 || version != kGreenVersion || hdr[0] != d_ ||
      hdr[1] != opts_.exact_steps || dl > 4096)
    return false;
  std::string desc(dl, '\0');
  f.read(desc.data(), static_cast<std::streamsize>(dl));
  if (desc != spec_.describe()) return false;
  double c0 = 0, c1 = 0;
  f.read(reinterpret_cast<char*>(&c0), sizeof c0);
  f.read(reinterpret_cast<char*>(&c1), sizeof c1);
  f.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!f || n != domain_->size()) return false;
  std::vector<double> v(n);
  f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!f) return false;
  exact_ = std::move(v);
  c0_ = c0;
  c1_ = c1;
  return true;
}

void GreenEvaluator::compute_exact_part() {
  const int K = opts_.exact_steps;
  domain_ = std::make_unique<CanonicalDomain>(d_, K, K);

  std::string cache_path;
  const bool cacheable = opts_.use_disk_cache && !std::holds_alternative<TabulatedLevy>(spec_.family());
  if (cacheable) {
    if (const char* dir = std::getenv("SUBWALK_CACHE_DIR"); dir && *dir) {
      cache_path = (std::filesystem::path(dir) / cache_name()).string();
      if (load_cache(cache_path)) return;
    }
  }

  auto& dom = *domain_;
  dom.build_neighbors();
  std::vector<double> p(dom.size(), 0.0);
  exact_.assign(dom.size(), 0.0);
  p[*dom.find(LatticePoint::origin(d_))] = 1.0;
  const double w = 1.0 / (2.0 * d_);
  const double half_d = d_ / 2.0;
  const int fit_from = std::max(1, K - 7);
  for (int k = 1; k <= K; ++k) {
    const auto lst = dom.parity_list(k & 1);
    const std::size_t n = dom.count_upto(k & 1, k);
    const double ck = renewal_[static_cast<std::size_t>(k)];
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < n; ++r) {
      const std::uint32_t i = lst[r];
      double s = 0.0;
      for (auto j : dom.neighbors(i))
        if (j != CanonicalDomain::kOutside) s += p[j];
      p[i] = s * w;
      exact_[i] += ck * p[i];
    }
    if (k >= fit_from) {
      const double kk = k;
      const double s0 = std::pow(kk, half_d + 1.0), s1 = std::pow(kk, half_d);
      for (std::size_t r = 0; r < n; ++r) {
        const std::uint32_t i = lst[r];
        const double r2 = static_cast<double>(dom.norm2sq(i));
        const double e = std::abs(p[i] - gaussian_q(d_, kk, r2));
        c0_ = std::max(c0_, e * s0);
        if (r2 > 0) c1_ = std::max(c1_, e * r2 * s1);
      }
    }
  }
  dom.drop_neighbors();
  if (!cache_path.empty()) save_cache(cache_path);
}

double GreenEvaluator::renewal_at(std::int64_t k) const { return renewal_[static_cast<std::size_t>(k)]; }

std::int64_t GreenEvaluator::gaussian_end(double norm2sq) const {
  const std::int64_t K = opts_.exact_steps;
  const std::int64_t lo = 2 * K;
  const std::int64_t hi = std::min<std::int64_t>(16 * K, renewal_limit_);
  const double want = std::ceil(opts_.split * norm2sq);
  if (want <= static_cast<double>(lo)) return std::min(lo, hi);
  if (want >= static_cast<double>(hi)) return hi;
  return static_cast<std::int64_t>(want);
}

namespace {

// int_{t0}^inf t^{-s-1} e^{-beta/t} dt = beta^{-s} gamma(s, beta/t0)
double power_exp_tail(double s, double beta, double t0) {
  const double z = beta / t0;
  if (z < 1.0) {
    // t0^{-s} sum_n (-z)^n / (n! (s + n))
    double term = 1.0, sum = 0.0;
    for (int n = 0; n < 200; ++n) {
      const double add = term / (s + n);
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
      term *= -z / (n + 1);
    }
    return std::pow(t0, -s) * sum;
  }
  return std::pow(beta, -s) * boost::math::tgamma_lower(s, z);
}

}  // namespace

double GreenEvaluator::tail_integral(double beta, double t0) const {
  const double dd = d_;
  const double a = alpha_ / 2.0;
  const double pref = std::pow(dd / (2.0 * kPi), dd / 2.0);
  if (spec_.is_power()) {
    const double s1 = dd / 2.0 - a;
    const double j1 = power_exp_tail(s1, beta, t0);
    const double j2 = power_exp_tail(s1 + 1.0, beta, t0);
    return pref / std::tgamma(a) * (j1 + 0.5 * a * (a - 1.0) * j2);
  }
  auto f = [&](double u) {
    const double t = t0 + u;
    const double l = spec_.has_slowly_varying() ? spec_.slowly_varying(t) : 1.0;
    return std::pow(t, -dd / 2.0 + a - 1.0) * l * std::exp(-beta / t);
  };
  boost::math::quadrature::exp_sinh<double> es;
  return pref * fit_amp_ * es.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

double GreenEvaluator::tail_clt_bound(double r2, double t0) const {
  const double a = alpha_ / 2.0;
  const double h = d_ / 2.0;
  const std::int64_t kt = std::min<std::int64_t>(static_cast<std::int64_t>(t0) + 1, renewal_limit_);
  // C(t) <= scale t^{a-1} beyond t0 up to slowly varying drift
  const double scale = 1.05 * renewal_at(kt) / std::pow(static_cast<double>(kt), a - 1.0);
  double b = 1.1 * c0_ * std::pow(t0, a - h - 1.0) / (h + 1.0 - a);
  if (r2 > 0) b = std::min(b, 1.1 * c1_ / r2 * std::pow(t0, a - h) / (h - a));
  return 0.5 * scale * b;
}

GreenEvaluator::Zone GreenEvaluator::compute_zone(std::int64_t r2) const {
  Zone z;
  const std::int64_t K = opts_.exact_steps;
  const std::int64_t k2 = gaussian_end(static_cast<double>(r2));
  const int par = static_cast<int>(r2 & 1);
  const double h = d_ / 2.0;
  const double rr = static_cast<double>(r2);
  CompensatedSum g, ge;
  std::int64_t k = K + 1;
  if ((k & 1) != par) ++k;
  for (; k <= k2; k += 2) {
    const double kk = static_cast<double>(k);
    const double c = renewal_at(k);
    g.add(c * gaussian_q(d_, kk, rr));
    double b = c0_ * std::pow(kk, -h - 1.0);
    if (r2 > 0) b = std::min(b, c1_ * std::pow(kk, -h) / rr);
    ge.add(1.1 * c * b);
  }
  z.gauss = g.value();
  z.gauss_err = ge.value();

  // first matching k beyond the Gaussian zone is k; midpoint rule on spacing 2
  const double t0 = static_cast<double>(k) - 1.0;
  const double beta = d_ * rr / 2.0;
  z.tail = tail_integral(beta, t0);
  double model = model_rel_err_;
  if (spec_.is_power()) {
    const double a = alpha_ / 2.0;
    const std::int64_t km = std::min<std::int64_t>(k, renewal_limit_);
    const double t = static_cast<double>(km);
    const double approx = std::pow(t, a - 1.0) / std::tgamma(a) * (1.0 + a * (a - 1.0) / (2.0 * t));
    model = std::abs(renewal_at(km) - approx) / renewal_at(km);
  }
  z.tail_err = tail_clt_bound(rr, t0) + 2.0 * model * z.tail + 1e-12 * z.tail;
  return z;
}

GreenEvaluator::Zone GreenEvaluator::zone(std::int64_t r2) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = zones_.find(r2);
    if (it != zones_.end()) return it->second;
  }
  Zone z = compute_zone(r2);
  std::lock_guard<std::mutex> lock(mu_);
  zones_.emplace(r2, z);
  return z;
}

GreenValue GreenEvaluator::evaluate(std::span<const std::int64_t> x, bool full) const {
  if (static_cast<int>(x.size()) != d_) throw DomainError("dimension mismatch");
  std::int64_t r2 = 0, n1 = 0;
  for (auto v : x) {
    r2 += v * v;
    n1 += v < 0 ? -v : v;
  }
  GreenValue out;
  if (n1 <= opts_.exact_steps) {
    auto idx = domain_->find(x);
    out.exact_part = exact_[*idx];
  }
  const Zone z = zone(r2);
  out.gaussian_part = z.gauss;
  out.tail_part = z.tail;
  out.gaussian_error = z.gauss_err;
  out.tail_error = z.tail_err;
  out.value = out.exact_part + out.gaussian_part + out.tail_part;
  if (full && n1 == 0) out.value += 1.0;
  out.error_bound = 1e-14 * out.exact_part + z.gauss_err + z.tail_err;
  return out;
}

GreenValue GreenEvaluator::green_from_one(const LatticePoint& x) const {
  GreenValue v = evaluate(x.coords, false);
  if (v.error_bound > opts_.tolerance * v.value) {
    std::ostringstream os;
    os << "Green error bound " << v.error_bound << " exceeds tolerance " << opts_.tolerance << " x value "
       << v.value << " at x = " << x.str() << "; raise exact_steps";
    throw BudgetExceeded(os.str());
  }
  return v;
}

GreenValue GreenEvaluator::green_full(const LatticePoint& x) const {
  GreenValue v = green_from_one(x);
  if (x.is_origin()) v.value += 1.0;
  return v;
}

double GreenEvaluator::full_value(std::span<const std::int64_t> x) const { return evaluate(x, true).value; }

RieszReport ratio_to_riesz(const GreenEvaluator& ev, const std::vector<int>& radii) {
  const int d = ev.dim();
  const double alpha = ev.alpha();
  RieszReport rep;
  rep.derived_ratio = std::pow(2.0 * d, -alpha / 2.0);
  rep.stated_ratio = std::pow(2.0 / d, alpha / 2.0);
  const double A = riesz_constant(d, alpha);
  for (int r : radii) {
    if (r <= 0) throw DomainError("radii must be positive");
    auto x = LatticePoint::origin(d);
    x[0] = r;
    const double g = ev.green_from_one(x).value;
    const double rz = A * std::pow(static_cast<double>(r), alpha - d);
    rep.rows.push_back({static_cast<double>(r), g, rz, rz / g});
  }
  if (!rep.rows.empty()) {
    const double last = rep.rows.back().ratio;
    rep.closer = std::abs(last - rep.derived_ratio) <= std::abs(last - rep.stated_ratio) ? "derived" : "stated";
  }
  return rep;
}

}  // namespace subwalk
