#include "bbbvote/group.hpp"

#include <algorithm>
#include <sstream>

#include "bbbvote/errors.hpp"
#include "json.hpp"

namespace bbbvote {

namespace {

// RFC 2409 second Oakley group (1024-bit safe prime), generator 2.
constexpr const char* kModp1024 =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE65381FFFFFFFFFFFFFFFF";

// RFC 3526 group 14 (2048-bit safe prime), generator 2.
constexpr const char* kModp2048 =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

struct CurveConstants {
  const char* name;
  const char* p;
  const char* a;
  const char* b;
  const char* order;
  const char* gx;
  const char* gy;
};

constexpr CurveConstants kSecp256k1 = {
    "secp256k1",
    "FFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F",
    "0",
    "7",
    "FFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141",
    "79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798",
    "483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8",
};

// y^2 = x^3 + 3x + 7 over F_32803, prime order 32563, cofactor 1.
constexpr CurveConstants kTinyCurve = {
    "tiny-32803", "8023", "3", "7", "7F33", "2", "B95",
};

std::size_t byte_width(const mpz_class& v) {
  return (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
}

mpz_class hex_mpz(const char* s) { return mpz_class(s, 16); }

bool is_probable_prime(const mpz_class& v) {
  return mpz_probab_prime_p(v.get_mpz_t(), 30) > 0;
}

mpz_class mod(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Bytes export_fixed(const mpz_class& v, std::size_t width) {
  Bytes out(width, 0);
  std::size_t count = 0;
  if (v != 0) {
    Bytes tmp(byte_width(v));
    mpz_export(tmp.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
    if (count > width) {
      throw Error(ErrorCode::kInvalidArgument, "value exceeds encoding width");
    }
    std::copy(tmp.begin(), tmp.begin() + count, out.end() - count);
  }
  return out;
}

mpz_class import_bytes(std::span<const std::uint8_t> data) {
  mpz_class v;
  if (!data.empty()) mpz_import(v.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
  return v;
}

}  // namespace

const char* to_string(BackendKind kind) {
  return kind == BackendKind::kIA ? "IA" : "EC";
}

const char* to_string(SecurityProfile profile) {
  switch (profile) {
    case SecurityProfile::kTestSmall: return "test-small";
    case SecurityProfile::kProduction: return "production";
    case SecurityProfile::kProduction2048: return "production-2048";
  }
  return "?";
}

const char* to_string(Coords coords) {
  return coords == Coords::kAffine ? "affine" : "jacobi";
}

BackendKind parse_backend(const std::string& s) {
  if (s == "ia" || s == "IA") return BackendKind::kIA;
  if (s == "ec" || s == "EC") return BackendKind::kEC;
  throw Error(ErrorCode::kParse, "unknown backend '" + s + "'");
}

SecurityProfile parse_profile(const std::string& s) {
  if (s == "test-small") return SecurityProfile::kTestSmall;
  if (s == "production") return SecurityProfile::kProduction;
  if (s == "production-2048") return SecurityProfile::kProduction2048;
  throw Error(ErrorCode::kParse, "unknown security profile '" + s + "'");
}

Coords parse_coords(const std::string& s) {
  if (s == "affine") return Coords::kAffine;
  if (s == "jacobi") return Coords::kJacobi;
  throw Error(ErrorCode::kParse, "unknown coordinates '" + s + "'");
}

std::string to_string(const OpCounter& c) {
  std::ostringstream os;
  os << "mults=" << c.group_mults << " exps=" << c.exponentiations
     << " dbl=" << c.doublings << " inv=" << c.field_inversions
     << " fmul=" << c.field_mults << " hash=" << c.hashes
     << " affine=" << c.affine_transforms;
  return os.str();
}

// ---------------------------------------------------------------------------
// GroupParams

std::size_t GroupParams::element_width() const { return byte_width(modulus); }
std::size_t GroupParams::scalar_width() const { return byte_width(exponent_order); }

Scalar GroupParams::scalar(const mpz_class& v) const {
  return Scalar(mod(v, exponent_order));
}
Scalar GroupParams::add(const Scalar& a, const Scalar& b) const {
  return scalar(a.value() + b.value());
}
Scalar GroupParams::sub(const Scalar& a, const Scalar& b) const {
  return scalar(a.value() - b.value());
}
Scalar GroupParams::mul(const Scalar& a, const Scalar& b) const {
  return scalar(a.value() * b.value());
}
Scalar GroupParams::neg(const Scalar& a) const { return scalar(-a.value()); }

unsigned choice_spacing(unsigned n) {
  unsigned m = 0;
  while ((std::uint64_t{1} << m) <= n) ++m;
  return m;
}

std::shared_ptr<const GroupParams> derive_params(BackendKind backend,
                                                 SecurityProfile profile,
                                                 unsigned n, unsigned k) {
  if (n < 3) {
    throw Error(ErrorCode::kPrivacyPrecondition,
                "at least 3 participants are required for vote privacy");
  }
  if (k < 2) {
    throw Error(ErrorCode::kInvalidArgument, "at least 2 choices are required");
  }

  auto params = std::make_shared<GroupParams>();
  params->backend = backend;
  params->profile = profile;
  params->n = n;
  params->k = k;
  params->m = choice_spacing(n);

  if (backend == BackendKind::kIA) {
    switch (profile) {
      case SecurityProfile::kTestSmall:
        params->modulus = 23;
        params->generator = Element::residue(5);
        params->name = "ia-23";
        break;
      case SecurityProfile::kProduction:
        params->modulus = hex_mpz(kModp1024);
        params->generator = Element::residue(2);
        params->name = "ia-1024";
        break;
      case SecurityProfile::kProduction2048:
        params->modulus = hex_mpz(kModp2048);
        params->generator = Element::residue(2);
        params->name = "ia-2048";
        break;
    }
    const mpz_class& p = params->modulus;
    mpz_class q = (p - 1) / 2;
    if (!is_probable_prime(p) || !is_probable_prime(q)) {
      throw Error(ErrorCode::kInvalidArgument, "modulus is not a safe prime");
    }
    const mpz_class& g = params->generator.x();
    mpz_class g2 = mod(g * g, p);
    if (g <= 1 || g >= p || g2 == 1) {
      throw Error(ErrorCode::kInvalidArgument, "generator order must exceed 2");
    }
    mpz_class gq;
    mpz_powm(gq.get_mpz_t(), g.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    params->generator_order = gq == 1 ? q : p - 1;
    params->exponent_order = p - 1;
  } else {
    if (profile == SecurityProfile::kProduction2048) {
      throw Error(ErrorCode::kInvalidArgument,
                  "production-2048 is an IA-only profile");
    }
    const CurveConstants& c =
        profile == SecurityProfile::kTestSmall ? kTinyCurve : kSecp256k1;
    params->name = c.name;
    params->modulus = hex_mpz(c.p);
    params->a = hex_mpz(c.a);
    params->b = hex_mpz(c.b);
    params->cofactor = 1;
    params->exponent_order = hex_mpz(c.order);
    params->generator_order = params->exponent_order;
    params->generator = Element::affine(hex_mpz(c.gx), hex_mpz(c.gy));
    const mpz_class& p = params->modulus;
    if (mod(4 * params->a * params->a * params->a + 27 * params->b * params->b, p) == 0) {
      throw Error(ErrorCode::kInvalidArgument, "singular curve");
    }
  }

  // 2^((k-1)m) must stay below ord(g) or f_1..f_k collide.
  const std::size_t order_bits = mpz_sizeinbase(params->generator_order.get_mpz_t(), 2);
  const std::uint64_t top_exponent_bits = std::uint64_t{k - 1} * params->m;
  if (top_exponent_bits >= order_bits) {
    throw Error(ErrorCode::kParameterOverflow,
                "choice generators exceed the exponent bit budget (k=" +
                    std::to_string(k) + ", m=" + std::to_string(params->m) + ")");
  }

  Group group(params, Coords::kJacobi);
  if (!group.is_valid(params->generator)) {
    throw Error(ErrorCode::kInvalidArgument, "generator is not a valid element");
  }
  if (backend == BackendKind::kEC &&
      !group.is_identity(group.exp(params->generator, Scalar(params->exponent_order)))) {
    throw Error(ErrorCode::kInvalidArgument, "base point order mismatch");
  }

  // f_1 = g, f_{l+1} = f_l squared (doubled) m times.
  Element f = params->generator;
  for (unsigned l = 0; l < k; ++l) {
    if (l > 0) {
      for (unsigned s = 0; s < params->m; ++s) f = group.op(f, f);
      f = group.to_affine(f);
    }
    params->choice_generators.push_back(f);
    params->choice_inverses.push_back(group.inv(f));
  }
  for (unsigned i = 0; i < k; ++i) {
    for (unsigned j = i + 1; j < k; ++j) {
      if (group.equal(params->choice_generators[i], params->choice_generators[j])) {
        throw Error(ErrorCode::kParameterOverflow, "choice generators collide");
      }
    }
  }

  mpz_class max_exponent = mpz_class(n);
  mpz_mul_2exp(max_exponent.get_mpz_t(), max_exponent.get_mpz_t(),
               static_cast<mp_bitcnt_t>(top_exponent_bits));
  params->unique_decoding = max_exponent < params->generator_order;
  return params;
}

std::string params_document(const GroupParams& params) {
  nlohmann::ordered_json doc;
  doc["backend_kind"] = to_string(params.backend);
  doc["security_profile"] = to_string(params.profile);
  doc["name"] = params.name;
  auto point = [](const Element& e) {
    nlohmann::ordered_json j;
    j["x"] = e.x().get_str();
    j["y"] = e.y().get_str();
    return j;
  };
  if (params.backend == BackendKind::kIA) {
    doc["p"] = params.modulus.get_str();
    doc["g"] = params.generator.x().get_str();
  } else {
    doc["field_prime"] = params.modulus.get_str();
    doc["a"] = params.a.get_str();
    doc["b"] = params.b.get_str();
    doc["nn"] = params.exponent_order.get_str();
    doc["hh"] = params.cofactor.get_str();
    doc["G"] = point(params.generator);
  }
  doc["exponent_order"] = params.exponent_order.get_str();
  doc["generator_order"] = params.generator_order.get_str();
  doc["n"] = params.n;
  doc["k"] = params.k;
  doc["m"] = params.m;
  auto gens = nlohmann::ordered_json::array();
  for (const auto& f : params.choice_generators) {
    if (params.backend == BackendKind::kIA) {
      gens.push_back(f.x().get_str());
    } else {
      gens.push_back(point(f));
    }
  }
  doc["choice_generators"] = gens;
  doc["unique_decoding"] = params.unique_decoding;
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Group

Group::Group(std::shared_ptr<const GroupParams> params, Coords coords)
    : params_(std::move(params)), coords_(coords) {}

Element Group::identity() const {
  return backend() == BackendKind::kIA ? Element::residue(1) : Element::infinity();
}

const Element& Group::choice_generator(unsigned l) const {
  if (l < 1 || l > params_->k) {
    throw Error(ErrorCode::kChoiceOutOfRange,
                "choice " + std::to_string(l) + " outside 1.." + std::to_string(params_->k));
  }
  return params_->choice_generators[l - 1];
}

bool Group::is_identity(const Element& a) const {
  if (backend() == BackendKind::kIA) return a.x() == 1;
  return a.is_infinity();
}

bool Group::is_valid(const Element& a) const {
  const mpz_class& p = params_->modulus;
  if (backend() == BackendKind::kIA) {
    return a.form() == Element::Form::kResidue && a.x() >= 1 && a.x() < p;
  }
  switch (a.form()) {
    case Element::Form::kInfinity:
      return true;
    case Element::Form::kResidue:
      return false;
    case Element::Form::kAffine: {
      if (a.x() < 0 || a.x() >= p || a.y() < 0 || a.y() >= p) return false;
      return mod(a.y() * a.y() - a.x() * a.x() * a.x() - params_->a * a.x() - params_->b, p) == 0;
    }
    case Element::Form::kJacobi: {
      if (mod(a.z(), p) == 0) return false;
      mpz_class z2 = mod(a.z() * a.z(), p);
      mpz_class z4 = mod(z2 * z2, p);
      mpz_class z6 = mod(z4 * z2, p);
      return mod(a.y() * a.y() - a.x() * a.x() * a.x() - params_->a * a.x() * z4 -
                     params_->b * z6,
                 p) == 0;
    }
  }
  return false;
}

mpz_class Group::fred(const mpz_class& a) const { return mod(a, params_->modulus); }

mpz_class Group::fmul(const mpz_class& a, const mpz_class& b) {
  counter_.field_mults++;
  mpz_class r = a * b;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), params_->modulus.get_mpz_t());
  return r;
}

mpz_class Group::finv(const mpz_class& a) {
  counter_.field_inversions++;
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), params_->modulus.get_mpz_t()) == 0) {
    throw Error(ErrorCode::kInvalidArgument, "field element has no inverse");
  }
  return r;
}

Element Group::ec_neg(const Element& a) const {
  switch (a.form()) {
    case Element::Form::kAffine: return Element::affine(a.x(), fred(-a.y()));
    case Element::Form::kJacobi: return Element::jacobi(a.x(), fred(-a.y()), a.z());
    default: return a;
  }
}

Element Group::affine_add(const Element& a, const Element& b) {
  if (a.x() == b.x()) {
    if (a.y() == b.y() && a.y() != 0) return affine_double(a);
    return Element::infinity();
  }
  mpz_class lambda = fmul(fred(b.y() - a.y()), finv(fred(b.x() - a.x())));
  mpz_class x3 = fred(fsqr(lambda) - a.x() - b.x());
  mpz_class y3 = fred(fmul(lambda, fred(a.x() - x3)) - a.y());
  return Element::affine(std::move(x3), std::move(y3));
}

Element Group::affine_double(const Element& a) {
  counter_.doublings++;
  if (a.is_infinity() || a.y() == 0) return Element::infinity();
  mpz_class num = fred(3 * fsqr(a.x()) + params_->a);
  mpz_class lambda = fmul(num, finv(fred(2 * a.y())));
  mpz_class x3 = fred(fsqr(lambda) - 2 * a.x());
  mpz_class y3 = fred(fmul(lambda, fred(a.x() - x3)) - a.y());
  return Element::affine(std::move(x3), std::move(y3));
}

Element Group::jacobi_add(const Element& a, const Element& b) {
  const bool a_one = a.form() == Element::Form::kAffine;
  const bool b_one = b.form() == Element::Form::kAffine;
  mpz_class u1 = a.x(), s1 = a.y(), u2 = b.x(), s2 = b.y();
  if (!b_one) {
    mpz_class zz = fsqr(b.z());
    u1 = fmul(a.x(), zz);
    s1 = fmul(a.y(), fmul(b.z(), zz));
  }
  if (!a_one) {
    mpz_class zz = fsqr(a.z());
    u2 = fmul(b.x(), zz);
    s2 = fmul(b.y(), fmul(a.z(), zz));
  }
  mpz_class h = fred(u2 - u1);
  mpz_class r = fred(s2 - s1);
  if (h == 0) {
    if (r == 0) return jacobi_double(a);
    return Element::infinity();
  }
  mpz_class hh = fsqr(h);
  mpz_class hhh = fmul(h, hh);
  mpz_class v = fmul(u1, hh);
  mpz_class x3 = fred(fsqr(r) - hhh - 2 * v);
  mpz_class y3 = fred(fmul(r, fred(v - x3)) - fmul(s1, hhh));
  mpz_class z3 = h;
  if (!a_one) z3 = fmul(z3, a.z());
  if (!b_one) z3 = fmul(z3, b.z());
  return Element::jacobi(std::move(x3), std::move(y3), std::move(z3));
}

Element Group::jacobi_double(const Element& a) {
  counter_.doublings++;
  if (a.is_infinity() || a.y() == 0) return Element::infinity();
  const bool one = a.form() == Element::Form::kAffine;
  mpz_class xx = fsqr(a.x());
  mpz_class yy = fsqr(a.y());
  mpz_class yyyy = fsqr(yy);
  mpz_class s = fred(4 * fmul(a.x(), yy));
  mpz_class m = 3 * xx;
  if (params_->a != 0) {
    if (one) {
      m += params_->a;
    } else {
      mpz_class zz = fsqr(a.z());
      m += fmul(params_->a, fsqr(zz));
    }
  }
  m = fred(m);
  mpz_class x3 = fred(fsqr(m) - 2 * s);
  mpz_class y3 = fred(fmul(m, fred(s - x3)) - 8 * yyyy);
  mpz_class z3 = one ? fred(2 * a.y()) : fred(2 * fmul(a.y(), a.z()));
  return Element::jacobi(std::move(x3), std::move(y3), std::move(z3));
}

Element Group::ec_add(const Element& a, const Element& b) {
  counter_.group_mults++;
  if (a.is_infinity()) return b;
  if (b.is_infinity()) return a;
  if (coords_ == Coords::kAffine) {
    return affine_add(to_affine(a), to_affine(b));
  }
  return jacobi_add(a, b);
}

Element Group::ec_double(const Element& a) {
  if (a.is_infinity()) return a;
  if (coords_ == Coords::kAffine) return affine_double(to_affine(a));
  return jacobi_double(a);
}

Element Group::op(const Element& a, const Element& b) {
  if (backend() == BackendKind::kIA) {
    counter_.group_mults++;
    mpz_class r = a.x() * b.x();
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), params_->modulus.get_mpz_t());
    return Element::residue(std::move(r));
  }
  return ec_add(a, b);
}

Element Group::inv(const Element& a) {
  if (backend() == BackendKind::kIA) return Element::residue(finv(a.x()));
  return ec_neg(a);
}

Element Group::exp(const Element& base, const Scalar& s) {
  counter_.exponentiations++;
  const mpz_class& e = s.value();
  if (backend() == BackendKind::kIA) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.x().get_mpz_t(), e.get_mpz_t(),
             params_->modulus.get_mpz_t());
    return Element::residue(std::move(r));
  }
  if (e == 0 || base.is_infinity()) return Element::infinity();
  Element p = coords_ == Coords::kAffine ? to_affine(base) : base;
  const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  Element r = p;
  for (std::size_t i = bits - 1; i-- > 0;) {
    r = ec_double(r);
    if (mpz_tstbit(e.get_mpz_t(), i)) r = ec_add(r, p);
  }
  return r;
}

Element Group::simul_exp(const Element& p, const Scalar& s1, const Element& q,
                         const Scalar& s2) {
  counter_.exponentiations++;
  const mpz_class& e1 = s1.value();
  const mpz_class& e2 = s2.value();
  const bool ia = backend() == BackendKind::kIA;
  const mpz_class& mod_p = params_->modulus;

  auto mul = [&](const Element& a, const Element& b) {
    if (!ia) return ec_add(a, b);
    counter_.group_mults++;
    mpz_class r = a.x() * b.x();
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), mod_p.get_mpz_t());
    return Element::residue(std::move(r));
  };
  auto square = [&](const Element& a) {
    if (!ia) return ec_double(a);
    counter_.doublings++;
    mpz_class r = a.x() * a.x();
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), mod_p.get_mpz_t());
    return Element::residue(std::move(r));
  };

  Element pa = (!ia && coords_ == Coords::kAffine) ? to_affine(p) : p;
  Element qa = (!ia && coords_ == Coords::kAffine) ? to_affine(q) : q;
  const std::size_t bits = std::max(e1 == 0 ? 0 : mpz_sizeinbase(e1.get_mpz_t(), 2),
                                    e2 == 0 ? 0 : mpz_sizeinbase(e2.get_mpz_t(), 2));
  if (bits == 0) return identity();
  const bool need_sum = e1 != 0 && e2 != 0;
  Element pq = need_sum ? mul(pa, qa) : identity();

  Element r = identity();
  bool started = false;
  for (std::size_t i = bits; i-- > 0;) {
    if (started) r = square(r);
    const bool b1 = mpz_tstbit(e1.get_mpz_t(), i);
    const bool b2 = mpz_tstbit(e2.get_mpz_t(), i);
    const Element* sel = b1 && b2 ? &pq : b1 ? &pa : b2 ? &qa : nullptr;
    if (sel == nullptr) continue;
    if (started) {
      r = mul(r, *sel);
    } else {
      r = *sel;
      started = true;
    }
  }
  return r;
}

Element Group::to_affine(const Element& a) {
  if (!a.is_jacobi()) return a;
  counter_.affine_transforms++;
  mpz_class zi = finv(a.z());
  mpz_class zi2 = fsqr(zi);
  mpz_class x = fmul(a.x(), zi2);
  mpz_class y = fmul(a.y(), fmul(zi2, zi));
  return Element::affine(std::move(x), std::move(y));
}

std::optional<Element> Group::to_affine(const Element& a, const mpz_class& hint) {
  if (!a.is_jacobi()) {
    if (hint != 0) return std::nullopt;
    return a;
  }
  if (!verify_inverse_hint(a.z(), hint)) return std::nullopt;
  counter_.affine_transforms++;
  mpz_class zi2 = fsqr(hint);
  mpz_class x = fmul(a.x(), zi2);
  mpz_class y = fmul(a.y(), fmul(zi2, hint));
  return Element::affine(std::move(x), std::move(y));
}

bool Group::verify_inverse_hint(const mpz_class& x, const mpz_class& hint) {
  if (hint <= 0 || hint >= params_->modulus) return false;
  return fmul(x, hint) == 1;
}

mpz_class Group::inverse_hint(const Element& a) {
  if (!a.is_jacobi()) return 0;
  return finv(a.z());
}

bool Group::equal(const Element& a, const Element& b) {
  if (backend() == BackendKind::kIA) return a.x() == b.x();
  Element na = to_affine(a);
  Element nb = to_affine(b);
  if (na.is_infinity() || nb.is_infinity()) return na.is_infinity() && nb.is_infinity();
  return na.x() == nb.x() && na.y() == nb.y();
}

bool Group::matches(const Element& a, const Element& t) {
  if (backend() == BackendKind::kIA) return a.x() == t.x();
  if (a.is_infinity() || t.is_infinity()) return a.is_infinity() && t.is_infinity();
  if (!a.is_jacobi()) return a.x() == t.x() && a.y() == t.y();
  mpz_class zz = fsqr(a.z());
  if (fmul(t.x(), zz) != a.x()) return false;
  return fmul(t.y(), fmul(zz, a.z())) == a.y();
}

Bytes Group::field_bytes(const mpz_class& v) const {
  return export_fixed(v, params_->element_width());
}

Bytes Group::canonical_bytes(const Element& a) {
  const std::size_t w = params_->element_width();
  if (backend() == BackendKind::kIA) {
    if (is_identity(a)) return Bytes(w, 0);
    return export_fixed(a.x(), w);
  }
  Element n = to_affine(a);
  if (n.is_infinity()) return Bytes(2 * w, 0);
  Bytes out = export_fixed(n.x(), w);
  Bytes y = export_fixed(n.y(), w);
  out.insert(out.end(), y.begin(), y.end());
  return out;
}

Bytes Group::canonical_bytes(const Scalar& s) const {
  return export_fixed(s.value(), params_->scalar_width());
}

mpz_class Group::decode_field(std::span<const std::uint8_t> data) const {
  if (data.size() != params_->element_width()) {
    throw Error(ErrorCode::kMalformed, "field value has wrong width");
  }
  mpz_class v = import_bytes(data);
  if (v >= params_->modulus) throw Error(ErrorCode::kMalformed, "field value out of range");
  return v;
}

Element Group::decode_element(std::span<const std::uint8_t> data) const {
  const std::size_t w = params_->element_width();
  const bool zero = std::all_of(data.begin(), data.end(), [](auto b) { return b == 0; });
  if (backend() == BackendKind::kIA) {
    if (data.size() != w) throw Error(ErrorCode::kMalformed, "element has wrong width");
    if (zero) return identity();
    mpz_class v = import_bytes(data);
    // 1 is encoded by the all-zeros sentinel only.
    if (v <= 1 || v >= params_->modulus) {
      throw Error(ErrorCode::kMalformed, "residue out of range");
    }
    return Element::residue(std::move(v));
  }
  if (data.size() != 2 * w) throw Error(ErrorCode::kMalformed, "point has wrong width");
  if (zero) return Element::infinity();
  Element p = Element::affine(decode_field(data.subspan(0, w)), decode_field(data.subspan(w)));
  if (!is_valid(p)) throw Error(ErrorCode::kMalformed, "point not on curve");
  return p;
}

Scalar Group::decode_scalar(std::span<const std::uint8_t> data) const {
  if (data.size() != params_->scalar_width()) {
    throw Error(ErrorCode::kMalformed, "scalar has wrong width");
  }
  mpz_class v = import_bytes(data);
  if (v >= params_->exponent_order) throw Error(ErrorCode::kMalformed, "scalar not reduced");
  return Scalar(std::move(v));
}

}  // namespace bbbvote
