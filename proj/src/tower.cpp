#include "coxarith/tower.hpp"

#include <mutex>
#include <sstream>
#include <stdexcept>

namespace cox {

namespace {

using Coeffs = std::map<uint32_t, Rat>;

void add_term(Coeffs& c, uint32_t mask, const Rat& v) {
  if (v == 0) return;
  auto [it, fresh] = c.try_emplace(mask, v);
  if (fresh) return;
  it->second += v;
  if (it->second == 0) c.erase(it);
}

Coeffs add(const Coeffs& x, const Coeffs& y) {
  Coeffs r = x;
  for (const auto& [m, v] : y) add_term(r, m, v);
  return r;
}

Coeffs sub(const Coeffs& x, const Coeffs& y) {
  Coeffs r = x;
  for (const auto& [m, v] : y) add_term(r, m, Rat(-v));
  return r;
}

Coeffs neg(const Coeffs& x) {
  Coeffs r;
  for (const auto& [m, v] : x) r.emplace(m, -v);
  return r;
}

Coeffs scale(const Coeffs& x, const Rat& s) {
  if (s == 0) return {};
  Coeffs r;
  for (const auto& [m, v] : x) r.emplace(m, v * s);
  return r;
}

bool uses_bit(const Coeffs& x, uint32_t bit) {
  for (const auto& [m, v] : x)
    if (m & bit) return true;
  return false;
}

// x = A + B*g_{h-1}; B's masks have the top bit removed.
void split_top(const Coeffs& x, int h, Coeffs& A, Coeffs& B) {
  uint32_t bit = 1u << (h - 1);
  for (const auto& [m, v] : x) {
    if (m & bit)
      B.emplace(m & ~bit, v);
    else
      A.emplace(m, v);
  }
}

Coeffs times_gen(const Coeffs& x, uint32_t bit) {
  Coeffs r;
  for (const auto& [m, v] : x) r.emplace(m | bit, v);
  return r;
}

Coeffs mul(const Tower& t, int h, const Coeffs& x, const Coeffs& y) {
  if (x.empty() || y.empty()) return {};
  if (h == 0) return {{0u, x.at(0) * y.at(0)}};
  uint32_t bit = 1u << (h - 1);
  bool xh = uses_bit(x, bit), yh = uses_bit(y, bit);
  if (!xh && !yh) return mul(t, h - 1, x, y);
  Coeffs A, B, C, D;
  split_top(x, h, A, B);
  split_top(y, h, C, D);
  Coeffs out = mul(t, h - 1, A, C);
  if (!B.empty() && !D.empty()) {
    Coeffs bd = mul(t, h - 1, B, D);
    out = add(out, mul(t, h - 1, bd, t.gen(h - 1).square));
  }
  Coeffs cross = add(mul(t, h - 1, A, D), mul(t, h - 1, B, C));
  return add(out, times_gen(cross, bit));
}

Coeffs inv(const Tower& t, int h, const Coeffs& x) {
  if (x.empty()) throw std::domain_error("division by zero");
  if (h == 0) return {{0u, Rat(1) / x.at(0)}};
  uint32_t bit = 1u << (h - 1);
  if (!uses_bit(x, bit)) return inv(t, h - 1, x);
  Coeffs A, B;
  split_top(x, h, A, B);
  // 1/(A+Bg) = (A-Bg)/(A^2 - s B^2); the denominator is the conjugate norm
  // and cannot vanish while the tower invariant holds.
  const Coeffs& s = t.gen(h - 1).square;
  Coeffs d = sub(mul(t, h - 1, A, A), mul(t, h - 1, mul(t, h - 1, B, B), s));
  if (d.empty())
    throw std::domain_error("tower invariant violated: conjugate norm vanished");
  Coeffs di = inv(t, h - 1, d);
  Coeffs out = mul(t, h - 1, A, di);
  return add(out, times_gen(neg(mul(t, h - 1, B, di)), bit));
}

// Full descent square test.  A witness, when one exists, is unique up to
// sign at every level, so the search is complete.
std::optional<Coeffs> sqrt_in(const Tower& t, int h, const Coeffs& x) {
  if (x.empty()) return Coeffs{};
  if (h == 0) {
    auto r = perfect_square_root(x.at(0));
    if (!r) return std::nullopt;
    return Coeffs{{0u, *r}};
  }
  uint32_t bit = 1u << (h - 1);
  const Coeffs& s = t.gen(h - 1).square;
  if (!uses_bit(x, bit)) {
    // Roots of a prefix element are either prefix elements or prefix
    // multiples of g: (p + q g)^2 prefix forces p q = 0.
    if (auto r = sqrt_in(t, h - 1, x)) return r;
    Coeffs q = mul(t, h - 1, x, inv(t, h - 1, s));
    if (auto r = sqrt_in(t, h - 1, q)) return times_gen(*r, bit);
    return std::nullopt;
  }
  Coeffs A, B;
  split_top(x, h, A, B);
  // x = (p + q g)^2 with q != 0 forces p^2 = (A +- sqrt(A^2 - s B^2))/2.
  Coeffs disc = sub(mul(t, h - 1, A, A), mul(t, h - 1, mul(t, h - 1, B, B), s));
  auto n = sqrt_in(t, h - 1, disc);
  if (!n) return std::nullopt;
  Rat half(1, 2);
  for (int pick = 0; pick < 2; ++pick) {
    Coeffs p2 = scale(pick ? sub(A, *n) : add(A, *n), half);
    auto p = sqrt_in(t, h - 1, p2);
    if (!p || p->empty()) continue;
    Coeffs q = mul(t, h - 1, scale(B, half), inv(t, h - 1, *p));
    Coeffs y = add(*p, times_gen(q, bit));
    if (mul(t, h, y, y) == x) return y;
  }
  return std::nullopt;
}

std::string tower_key(const Tower* parent, const Generator& g) {
  std::ostringstream os;
  os << static_cast<const void*>(parent) << '|' << g.is_radical << '|';
  for (const auto& [m, v] : g.square) os << m << ':' << v.get_str() << ',';
  return os.str();
}

// ---- interval evaluation ----------------------------------------------

RatInterval iv_point(const Rat& v) { return {v, v}; }

RatInterval iv_add(const RatInterval& a, const RatInterval& b) {
  return {a.lo + b.lo, a.hi + b.hi};
}

RatInterval iv_mul(const RatInterval& a, const RatInterval& b) {
  Rat c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  Rat lo = c[0], hi = c[0];
  for (int i = 1; i < 4; ++i) {
    if (c[i] < lo) lo = c[i];
    if (c[i] > hi) hi = c[i];
  }
  return {lo, hi};
}

RatInterval iv_neg(const RatInterval& a) { return {-a.hi, -a.lo}; }

Rat dyadic(const Int& num, const Int& scale) {
  Rat r(num, scale);
  r.canonicalize();
  return r;
}

// Round endpoints outward to multiples of 2^-bits so they stay short.
RatInterval iv_round(const RatInterval& a, int bits) {
  Int scale = Int(1) << bits;
  Int lo_n, hi_n;
  Rat ls = a.lo * scale, hs = a.hi * scale;
  mpz_fdiv_q(lo_n.get_mpz_t(), ls.get_num_mpz_t(), ls.get_den_mpz_t());
  mpz_cdiv_q(hi_n.get_mpz_t(), hs.get_num_mpz_t(), hs.get_den_mpz_t());
  return {dyadic(lo_n, scale), dyadic(hi_n, scale)};
}

// [lower, upper] bounds for sqrt on a nonnegative interval, 2^-bits tight.
RatInterval iv_sqrt(const RatInterval& a, int bits) {
  Rat lo = a.lo < 0 ? Rat(0) : a.lo;
  Rat hi = a.hi < 0 ? Rat(0) : a.hi;
  Int scale = Int(1) << bits;
  Int sc2 = scale * scale;
  Int lo_r = isqrt(Int(lo.get_num()) * Int(lo.get_den()) * sc2) / Int(lo.get_den());
  Int hi_r = isqrt(Int(hi.get_num()) * Int(hi.get_den()) * sc2) / Int(hi.get_den()) + 1;
  return {dyadic(lo_r, scale), dyadic(hi_r, scale)};
}

RatInterval eval_iv(const Tower& t, int h, const Coeffs& x, FlipMask flips,
                    int bits) {
  if (x.empty()) return iv_point(Rat(0));
  if (h == 0) return iv_point(x.at(0));
  uint32_t bit = 1u << (h - 1);
  if (!uses_bit(x, bit)) return eval_iv(t, h - 1, x, flips, bits);
  Coeffs A, B;
  split_top(x, h, A, B);
  RatInterval ia = eval_iv(t, h - 1, A, flips, bits);
  RatInterval ib = eval_iv(t, h - 1, B, flips, bits);
  RatInterval is = eval_iv(t, h - 1, t.gen(h - 1).square, flips, bits);
  RatInterval ig = iv_sqrt(is, bits);
  if (flips & bit) ig = iv_neg(ig);
  return iv_round(iv_add(ia, iv_mul(ib, ig)), bits);
}

int sign_iv(const Tower& t, int h, const Coeffs& x, FlipMask flips) {
  if (x.empty()) return 0;
  for (int bits = 32;; bits *= 2) {
    RatInterval i = eval_iv(t, h, x, flips, bits);
    if (i.lo > 0) return 1;
    if (i.hi < 0) return -1;
    if (bits > 1 << 20)
      throw std::runtime_error("sign refinement failed to converge");
  }
}

// Every flipped assignment must keep each generator's square positive;
// squares only involve earlier generators, so one forward pass suffices.
void check_flips(const Tower& t, FlipMask flips) {
  if (flips == 0) return;
  if (flips >> t.height())
    throw std::domain_error("flip mask exceeds tower height");
  for (int i = 0; i < t.height(); ++i) {
    FlipMask below = flips & ((1u << i) - 1);
    if (sign_iv(t, i, t.gen(i).square, below) <= 0)
      throw std::domain_error(
          "inconsistent embedding: a generator's square becomes nonpositive");
  }
}

}  // namespace

// ---- Tower --------------------------------------------------------------

const TowerPtr& Tower::rationals() {
  static const TowerPtr base(new Tower());
  return base;
}

TowerPtr Tower::extend(const TowerPtr& parent, Generator g) {
  if (!parent) throw std::invalid_argument("null tower");
  if (parent->height() >= 31) throw std::domain_error("tower height cap (31) reached");
  for (auto& [m, v] : g.square) {
    if (m >> parent->height())
      throw std::invalid_argument("generator square not over parent tower");
    v.canonicalize();
  }
  static std::mutex mu;
  static std::map<std::string, std::weak_ptr<const Tower>> registry;
  std::lock_guard<std::mutex> lock(mu);
  std::string key = tower_key(parent.get(), g);
  auto it = registry.find(key);
  if (it != registry.end()) {
    if (auto live = it->second.lock()) return live;
  }
  auto t = std::shared_ptr<Tower>(new Tower());
  t->parent_ = parent;
  t->gens_ = parent->gens_;
  t->gens_.push_back(std::move(g));
  registry[key] = t;
  return t;
}

bool Tower::is_prefix_of(const Tower* other) const {
  while (other) {
    if (other == this) return true;
    if (other->height() <= height()) return false;
    other = other->parent_.get();
  }
  return false;
}

// ---- TowerElement -------------------------------------------------------

TowerElement::TowerElement(const Rat& r) : tower_(Tower::rationals()) {
  Rat v = r;
  v.canonicalize();
  if (v != 0) coeffs_.emplace(0u, v);
}

TowerElement TowerElement::rational(const Rat& r, const TowerPtr& t) {
  TowerElement e;
  e.tower_ = t;
  Rat v = r;
  v.canonicalize();
  if (v != 0) e.coeffs_.emplace(0u, v);
  return e;
}

TowerElement TowerElement::generator(const TowerPtr& t, int i) {
  if (i < 0 || i >= t->height()) throw std::out_of_range("generator index");
  TowerElement e;
  e.tower_ = t;
  e.coeffs_.emplace(1u << i, Rat(1));
  return e;
}

TowerElement TowerElement::from_coeffs(const TowerPtr& t,
                                       std::map<uint32_t, Rat> coeffs) {
  for (auto it = coeffs.begin(); it != coeffs.end();) {
    if (it->first >> t->height())
      throw std::invalid_argument("coefficient mask exceeds tower height");
    it->second.canonicalize();
    it = it->second == 0 ? coeffs.erase(it) : std::next(it);
  }
  TowerElement e;
  e.tower_ = t;
  e.coeffs_ = std::move(coeffs);
  return e;
}

bool TowerElement::is_rational() const {
  return coeffs_.empty() || (coeffs_.size() == 1 && coeffs_.begin()->first == 0);
}

Rat TowerElement::rational_value() const {
  if (coeffs_.empty()) return Rat(0);
  if (!is_rational()) throw std::domain_error("element is not rational");
  return coeffs_.begin()->second;
}

uint32_t TowerElement::support_mask() const {
  uint32_t m = 0;
  for (const auto& [mask, v] : coeffs_) m |= mask;
  return m;
}

bool TowerElement::has_formal_support() const {
  uint32_t m = support_mask();
  for (int i = 0; i < tower_->height(); ++i)
    if ((m >> i & 1) && !tower_->gen(i).is_radical) return true;
  return false;
}

TowerElement TowerElement::promoted(const TowerPtr& t) const {
  if (t.get() == tower_.get()) return *this;
  if (!tower_->is_prefix_of(t.get()))
    throw std::domain_error("tower mismatch: cannot promote");
  TowerElement e;
  e.tower_ = t;
  e.coeffs_ = coeffs_;
  return e;
}

namespace {

// Re-express x over joint, adjoining x's generators to joint as needed.
// Correct because generator values are pinned down by their squares plus
// positivity at the distinguished embedding, which adjoin_sqrt preserves.
TowerElement remap_into(const TowerElement& x, TowerPtr& joint) {
  const TowerPtr& tx = x.tower();
  std::vector<TowerElement> image;
  image.reserve(tx->height());
  for (int i = 0; i < tx->height(); ++i) {
    TowerElement sq = TowerElement::rational(Rat(0), joint);
    for (const auto& [mask, v] : tx->gen(i).square) {
      TowerElement mono = TowerElement::rational(v, joint);
      for (int j = 0; j < i; ++j)
        if (mask >> j & 1) mono *= image[j].promoted(joint);
      sq += mono;
    }
    auto [ext, root] = adjoin_sqrt(joint, sq);
    joint = ext;
    image.push_back(root);
  }
  TowerElement out = TowerElement::rational(Rat(0), joint);
  for (const auto& [mask, v] : x.coeffs()) {
    TowerElement mono = TowerElement::rational(v, joint);
    for (int j = 0; j < tx->height(); ++j)
      if (mask >> j & 1) mono *= image[j].promoted(joint);
    out += mono;
  }
  return out;
}

// Bring two elements into one tower: promote along a prefix chain when
// possible, otherwise merge the towers.
void align(TowerElement& a, TowerElement& b) {
  if (a.tower().get() == b.tower().get()) return;
  if (a.tower()->is_prefix_of(b.tower().get())) {
    a = a.promoted(b.tower());
  } else if (b.tower()->is_prefix_of(a.tower().get())) {
    b = b.promoted(a.tower());
  } else {
    TowerPtr joint = a.tower();
    b = remap_into(b, joint);
    a = a.promoted(joint);
  }
}

}  // namespace

TowerElement TowerElement::operator-() const {
  TowerElement e;
  e.tower_ = tower_;
  e.coeffs_ = neg(coeffs_);
  return e;
}

TowerElement& TowerElement::operator+=(const TowerElement& o) {
  TowerElement b = o;
  align(*this, b);
  coeffs_ = add(coeffs_, b.coeffs_);
  return *this;
}

TowerElement& TowerElement::operator-=(const TowerElement& o) {
  TowerElement b = o;
  align(*this, b);
  coeffs_ = sub(coeffs_, b.coeffs_);
  return *this;
}

TowerElement& TowerElement::operator*=(const TowerElement& o) {
  TowerElement b = o;
  align(*this, b);
  coeffs_ = mul(*tower_, tower_->height(), coeffs_, b.coeffs_);
  return *this;
}

TowerElement& TowerElement::operator/=(const TowerElement& o) {
  TowerElement b = o;
  align(*this, b);
  coeffs_ = mul(*tower_, tower_->height(), coeffs_,
                inv(*tower_, tower_->height(), b.coeffs_));
  return *this;
}

TowerElement TowerElement::pow(long k) const {
  TowerElement base = *this;
  if (k < 0) {
    base = TowerElement::rational(Rat(1), tower_) / base;
    k = -k;
  }
  TowerElement r = TowerElement::rational(Rat(1), tower_);
  while (k) {
    if (k & 1) r *= base;
    base *= base;
    k >>= 1;
  }
  return r;
}

bool TowerElement::operator==(const TowerElement& o) const {
  TowerElement a = *this, b = o;
  align(a, b);
  return a.coeffs_ == b.coeffs_;
}

std::string TowerElement::to_expr() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mask, v] : coeffs_) {
    Rat av = v < 0 ? Rat(-v) : v;
    if (first) {
      if (v < 0) os << '-';
      first = false;
    } else {
      os << (v < 0 ? " - " : " + ");
    }
    bool coeff_shown = false;
    if (av != 1 || mask == 0) {
      os << av.get_str();
      coeff_shown = true;
    }
    for (int i = 0; i < tower_->height(); ++i) {
      if (!(mask >> i & 1)) continue;
      if (coeff_shown) os << '*';
      coeff_shown = true;
      const Generator& g = tower_->gen(i);
      if (g.is_radical)
        os << "sqrt(" << g.radicand.get_str() << ')';
      else
        os << "sqrt(" << from_coeffs(tower_, g.square).to_expr() << ')';
    }
  }
  return os.str();
}

// ---- analytic operations ------------------------------------------------

RatInterval embed_interval(const TowerElement& x, FlipMask flips, int bits) {
  const Tower& t = *x.tower();
  check_flips(t, flips);
  if (x.is_zero()) return iv_point(Rat(0));
  Rat target = Rat(1, Int(1) << bits);
  for (int work = bits + 8;; work *= 2) {
    RatInterval i = eval_iv(t, t.height(), x.coeffs(), flips, work);
    if (i.width() <= target) return i;
    if (work > 1 << 22) throw std::runtime_error("interval refinement failed");
  }
}

int sign_of(const TowerElement& x, FlipMask flips) {
  check_flips(*x.tower(), flips);
  return sign_iv(*x.tower(), x.tower()->height(), x.coeffs(), flips);
}

double to_double(const TowerElement& x) {
  if (x.is_zero()) return 0.0;
  return embed_interval(x, 0, 80).mid().get_d();
}

TowerElement galois_conjugate(const TowerElement& x, FlipMask flips) {
  const Tower& t = *x.tower();
  if (flips >> t.height())
    throw std::domain_error("flip mask exceeds tower height");
  uint32_t touched = x.support_mask() | flips;
  for (int i = 0; i < t.height(); ++i)
    if ((touched >> i & 1) && !t.gen(i).is_radical)
      throw std::domain_error(
          "galois_conjugate requires rational-radical support");
  std::map<uint32_t, Rat> out;
  for (const auto& [mask, v] : x.coeffs()) {
    int par = __builtin_popcount(mask & flips) & 1;
    out.emplace(mask, par ? Rat(-v) : v);
  }
  return TowerElement::from_coeffs(x.tower(), std::move(out));
}

std::optional<TowerElement> is_square(const TowerElement& x) {
  auto r = sqrt_in(*x.tower(), x.tower()->height(), x.coeffs());
  if (!r) return std::nullopt;
  TowerElement w = TowerElement::from_coeffs(x.tower(), std::move(*r));
  if (!w.is_zero() && sign_of(w) < 0) w = -w;
  return w;
}

std::pair<TowerPtr, TowerElement> adjoin_sqrt(const TowerPtr& t,
                                              const TowerElement& x) {
  TowerElement v = x.promoted(t);
  if (v.is_zero() || sign_of(v) <= 0)
    throw std::domain_error("adjoin_sqrt: value not positive at the distinguished embedding");
  if (auto w = is_square(v)) return {t, *w};
  if (v.is_rational()) {
    auto [u, e] = squarefree_split(v.rational_value());
    Generator g;
    g.name = "r" + e.get_str();
    g.square = {{0u, Rat(e)}};
    g.is_radical = true;
    g.radicand = e;
    TowerPtr ext = Tower::extend(t, std::move(g));
    TowerElement root =
        TowerElement::generator(ext, ext->height() - 1) *
        TowerElement::rational(u, ext);
    return {ext, root};
  }
  Generator g;
  g.name = "w" + std::to_string(t->height());
  g.square = v.coeffs();
  g.is_radical = false;
  TowerPtr ext = Tower::extend(t, std::move(g));
  return {ext, TowerElement::generator(ext, ext->height() - 1)};
}

}  // namespace cox
