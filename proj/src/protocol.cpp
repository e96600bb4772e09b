#include "bbbvote/protocol.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "bbbvote/errors.hpp"

namespace bbbvote {

namespace {

constexpr std::uint8_t kWireVersion = 0x01;

void require_privacy_bound(std::size_t n) {
  if (n < 3) {
    throw Error(ErrorCode::kPrivacyPrecondition,
                "MPC keys need at least 3 participants, got " + std::to_string(n));
  }
}

// The three points the simultaneous-form verifier normalizes for branch l:
//   r G - d X        (compared with a_l)
//   r H + d F_l      (compared with the next one)
//   b_l + d V
std::array<Element, 3> membership_points(Group& group, const Element& pubkey,
                                         const Element& mpc_key, const Element& vote,
                                         const Element& choice_gen,
                                         const MembershipBranch& br) {
  const GroupParams& params = group.params();
  return {
      group.simul_exp(group.generator(), br.r, pubkey, params.neg(br.d)),
      group.simul_exp(mpc_key, br.r, choice_gen, br.d),
      group.op(br.b, group.exp(vote, br.d)),
  };
}

// r G - c A (compared with m1) and r B - c C (compared with m2).
std::array<Element, 2> recovery_points(Group& group, const Element& pubkey,
                                       const Element& faulty_pubkey,
                                       const RecoveryShare& share, const Scalar& c) {
  const Scalar minus_c = group.params().neg(c);
  return {
      group.simul_exp(group.generator(), share.r, pubkey, minus_c),
      group.simul_exp(faulty_pubkey, share.r, share.c, minus_c),
  };
}

Scalar membership_challenge(Group& group, const Element& pubkey, const Element& mpc_key,
                            const Element& vote,
                            std::span<const MembershipBranch> branches) {
  std::vector<TranscriptItem> items{pubkey, mpc_key, vote};
  for (const auto& br : branches) {
    items.emplace_back(br.a);
    items.emplace_back(br.b);
  }
  return fiat_shamir_challenge(group, DomainTag::kMembership, items);
}

Scalar recovery_challenge(Group& group, const Element& pubkey, const Element& faulty_pubkey,
                          const RecoveryShare& share) {
  const std::array<TranscriptItem, 5> items{pubkey, faulty_pubkey, share.c, share.m1,
                                            share.m2};
  return fiat_shamir_challenge(group, DomainTag::kRecovery, items);
}

bool normalize_checked(Group& group, const Element& point,
                       const std::vector<mpz_class>& hints, std::size_t idx,
                       Element& out) {
  if (hints.empty()) {
    out = group.to_affine(point);
    return true;
  }
  auto n = group.to_affine(point, hints[idx]);
  if (!n) return false;
  out = std::move(*n);
  return true;
}

Verdict reject(Group& group, const OpCounter& before, std::string reason) {
  return Verdict{false, std::move(reason), group.counter_snapshot() - before};
}

}  // namespace

EphemeralKeypair gen_keypair(Group& group, Rng& rng) {
  return keypair_from_secret(group, rng.nonzero_scalar(group.params()));
}

EphemeralKeypair keypair_from_secret(Group& group, const Scalar& secret) {
  return {secret, group.to_affine(group.exp(group.generator(), secret))};
}

Element compute_mpc_key(Group& group, std::span<const Element> pubkeys,
                        std::size_t owner) {
  if (owner < 1 || owner > pubkeys.size()) {
    throw Error(ErrorCode::kInvalidArgument, "MPC key owner out of range");
  }
  Element left = group.identity();
  Element right = group.identity();
  for (std::size_t j = 1; j < owner; ++j) left = group.op(left, pubkeys[j - 1]);
  for (std::size_t j = owner + 1; j <= pubkeys.size(); ++j) {
    right = group.op(right, pubkeys[j - 1]);
  }
  return group.div(left, right);
}

std::vector<MpcKey> mpc_keys_naive(Group& group, std::span<const Element> pubkeys) {
  require_privacy_bound(pubkeys.size());
  std::vector<MpcKey> keys;
  keys.reserve(pubkeys.size());
  for (std::size_t i = 1; i <= pubkeys.size(); ++i) {
    keys.push_back({i, compute_mpc_key(group, pubkeys, i)});
  }
  return keys;
}

std::vector<MpcKey> mpc_keys_cached(Group& group, std::span<const Element> pubkeys) {
  const std::size_t n = pubkeys.size();
  require_privacy_bound(n);

  // h_1 = 1 / (X_2 ... X_n); moving from i to i+1 puts X_i into the numerator
  // and takes X_{i+1} out of the denominator.
  Element right = pubkeys[1];
  for (std::size_t j = 2; j < n; ++j) right = group.op(right, pubkeys[j]);

  std::vector<MpcKey> keys;
  keys.reserve(n);
  Element h = group.inv(right);
  keys.push_back({1, h});
  for (std::size_t i = 1; i < n; ++i) {
    h = group.op(group.op(h, pubkeys[i - 1]), pubkeys[i]);
    keys.push_back({i + 1, h});
  }
  return keys;
}

ShareSign share_sign(std::size_t honest, std::size_t faulty) {
  return faulty > honest ? ShareSign::kMultiply : ShareSign::kInvert;
}

Element blinding_key(Group& group, const Scalar& secret, const Element& mpc_key) {
  return group.exp(mpc_key, secret);
}

BlindedVote blind_vote(Group& group, std::size_t voter, const Scalar& secret,
                       const Element& mpc_key, unsigned choice) {
  const Element& f = group.choice_generator(choice);
  BlindedVote vote;
  vote.voter = voter;
  vote.value = group.to_affine(group.op(blinding_key(group, secret, mpc_key), f));
  return vote;
}

MembershipProof prove_membership(Group& group, const Scalar& secret,
                                 const Element& mpc_key, const Element& vote,
                                 unsigned choice, Rng& rng, ProveOptions opts) {
  const GroupParams& params = group.params();
  group.choice_generator(choice);  // range check

  const Element pubkey = group.to_affine(group.exp(group.generator(), secret));
  const Element h = group.to_affine(mpc_key);
  const Element b_vote = group.to_affine(vote);

  MembershipProof proof;
  proof.branches.resize(params.k);
  const Scalar w = rng.nonzero_scalar(params);
  Scalar d_sum = params.scalar(0);
  for (unsigned l = 1; l <= params.k; ++l) {
    MembershipBranch& br = proof.branches[l - 1];
    if (l == choice) {
      br.a = group.to_affine(group.exp(group.generator(), w));
      br.b = group.to_affine(group.exp(h, w));
      continue;
    }
    br.r = rng.nonzero_scalar(params);
    br.d = rng.nonzero_scalar(params);
    const Scalar minus_d = params.neg(br.d);
    // a_l = x^{-d} g^r, b_l = h^r (B / f_l)^{-d}
    br.a = group.to_affine(group.simul_exp(pubkey, minus_d, group.generator(), br.r));
    const Element ratio = group.op(b_vote, params.choice_inverses[l - 1]);
    br.b = group.to_affine(group.simul_exp(h, br.r, ratio, minus_d));
    d_sum = params.add(d_sum, br.d);
  }

  const Scalar c = membership_challenge(group, pubkey, h, b_vote, proof.branches);
  MembershipBranch& real = proof.branches[choice - 1];
  real.d = params.sub(c, d_sum);
  real.r = params.add(w, params.mul(secret, real.d));

  if (opts.inverse_hints && group.uses_jacobi()) {
    for (unsigned l = 1; l <= params.k; ++l) {
      auto pts = membership_points(group, pubkey, h, b_vote, group.choice_generator(l),
                                   proof.branches[l - 1]);
      for (const auto& p : pts) proof.hints.push_back(group.inverse_hint(p));
    }
  }
  return proof;
}

Verdict verify_membership(Group& group, const MembershipProof& proof,
                          const Element& pubkey, const Element& mpc_key,
                          const Element& vote, VerifyOptions opts) {
  const OpCounter before = group.counter_snapshot();
  const GroupParams& params = group.params();

  if (proof.branches.size() != params.k) return reject(group, before, "wrong branch count");
  if (!proof.hints.empty()) {
    if (!group.uses_jacobi() || !opts.simultaneous) {
      return reject(group, before, "inverse hints not accepted by this verifier");
    }
    if (proof.hints.size() != 3 * params.k) return reject(group, before, "wrong hint count");
  }
  if (!group.is_valid(pubkey) || !group.is_valid(mpc_key) || !group.is_valid(vote)) {
    return reject(group, before, "malformed statement element");
  }
  for (const auto& br : proof.branches) {
    if (!group.is_valid(br.a) || !group.is_valid(br.b) ||
        br.r.value() >= params.exponent_order || br.d.value() >= params.exponent_order ||
        br.r.value() < 0 || br.d.value() < 0) {
      return reject(group, before, "malformed proof element");
    }
  }

  const Element x = group.to_affine(pubkey);
  const Element h = group.to_affine(mpc_key);
  const Element v = group.to_affine(vote);

  const Scalar c = membership_challenge(group, x, h, v, proof.branches);
  Scalar d_sum = params.scalar(0);
  for (const auto& br : proof.branches) d_sum = params.add(d_sum, br.d);
  if (!(d_sum == c)) return reject(group, before, "challenge checksum mismatch");

  for (unsigned l = 1; l <= params.k; ++l) {
    const MembershipBranch& br = proof.branches[l - 1];
    const std::string where = " (branch " + std::to_string(l) + ")";
    if (opts.simultaneous) {
      auto pts = membership_points(group, x, h, v, group.choice_generator(l), br);
      std::array<Element, 3> norm;
      for (std::size_t i = 0; i < 3; ++i) {
        if (!normalize_checked(group, pts[i], proof.hints, 3 * (l - 1) + i, norm[i])) {
          return reject(group, before, "invalid inverse hint" + where);
        }
      }
      if (!group.equal(norm[0], br.a)) return reject(group, before, "first condition fails" + where);
      if (!group.equal(norm[1], norm[2])) return reject(group, before, "second condition fails" + where);
    } else {
      // g^r == a x^d and h^r == b (B / f_l)^d
      const Element lhs1 = group.exp(group.generator(), br.r);
      const Element rhs1 = group.op(br.a, group.exp(x, br.d));
      if (!group.equal(lhs1, rhs1)) return reject(group, before, "first condition fails" + where);
      const Element ratio = group.op(v, params.choice_inverses[l - 1]);
      const Element lhs2 = group.exp(h, br.r);
      const Element rhs2 = group.op(br.b, group.exp(ratio, br.d));
      if (!group.equal(lhs2, rhs2)) return reject(group, before, "second condition fails" + where);
    }
  }
  return Verdict{true, {}, group.counter_snapshot() - before};
}

RecoveryShare prove_pairwise_key(Group& group, std::size_t honest,
                                 const Scalar& secret, const Element& pubkey,
                                 std::size_t faulty, const Element& faulty_pubkey,
                                 Rng& rng, ProveOptions opts) {
  if (honest == faulty) {
    throw Error(ErrorCode::kSelfShare, "a participant cannot share a key with itself");
  }
  const GroupParams& params = group.params();
  const Element a = group.to_affine(pubkey);
  const Element b = group.to_affine(faulty_pubkey);

  RecoveryShare share;
  share.honest = honest;
  share.faulty = faulty;
  share.sign = share_sign(honest, faulty);
  share.c = group.to_affine(group.exp(b, secret));
  const Scalar w = rng.nonzero_scalar(params);
  share.m1 = group.to_affine(group.exp(group.generator(), w));
  share.m2 = group.to_affine(group.exp(b, w));
  const Scalar c = recovery_challenge(group, a, b, share);
  share.r = params.add(w, params.mul(c, secret));

  if (opts.inverse_hints && group.uses_jacobi()) {
    for (const auto& p : recovery_points(group, a, b, share, c)) {
      share.hints.push_back(group.inverse_hint(p));
    }
  }
  return share;
}

Verdict verify_pairwise_key(Group& group, const RecoveryShare& share,
                            const Element& pubkey, const Element& faulty_pubkey,
                            VerifyOptions opts) {
  const OpCounter before = group.counter_snapshot();
  const GroupParams& params = group.params();

  if (share.honest == share.faulty) return reject(group, before, "self share");
  if (share.sign != share_sign(share.honest, share.faulty)) {
    return reject(group, before, "sign flag inconsistent with indices");
  }
  if (!share.hints.empty()) {
    if (!group.uses_jacobi() || !opts.simultaneous) {
      return reject(group, before, "inverse hints not accepted by this verifier");
    }
    if (share.hints.size() != 2) return reject(group, before, "wrong hint count");
  }
  if (!group.is_valid(pubkey) || !group.is_valid(faulty_pubkey) || !group.is_valid(share.c) ||
      !group.is_valid(share.m1) || !group.is_valid(share.m2) ||
      share.r.value() < 0 || share.r.value() >= params.exponent_order) {
    return reject(group, before, "malformed share element");
  }

  const Element a = group.to_affine(pubkey);
  const Element b = group.to_affine(faulty_pubkey);
  const Scalar c = recovery_challenge(group, a, b, share);

  if (opts.simultaneous) {
    auto pts = recovery_points(group, a, b, share, c);
    Element n1, n2;
    if (!normalize_checked(group, pts[0], share.hints, 0, n1) ||
        !normalize_checked(group, pts[1], share.hints, 1, n2)) {
      return reject(group, before, "invalid inverse hint");
    }
    if (!group.equal(n1, share.m1)) return reject(group, before, "first condition fails");
    if (!group.equal(n2, share.m2)) return reject(group, before, "second condition fails");
  } else {
    // g^r == m1 A^c and B^r == m2 C^c
    if (!group.equal(group.exp(group.generator(), share.r),
                     group.op(share.m1, group.exp(a, c)))) {
      return reject(group, before, "first condition fails");
    }
    if (!group.equal(group.exp(b, share.r), group.op(share.m2, group.exp(share.c, c)))) {
      return reject(group, before, "second condition fails");
    }
  }
  return Verdict{true, {}, group.counter_snapshot() - before};
}

BlindedVote repair_blinded_vote(Group& group, const BlindedVote& vote,
                                std::span<const RecoveryShare> shares,
                                std::span<const std::size_t> faulty_set) {
  std::set<std::size_t> expected(faulty_set.begin(), faulty_set.end());
  if (expected.size() != faulty_set.size()) {
    throw Error(ErrorCode::kInvalidArgument, "faulty set has duplicates");
  }
  if (expected.count(vote.voter) != 0) {
    throw Error(ErrorCode::kSelfShare, "voter is in its own faulty set");
  }
  std::set<std::size_t> done;
  for (const auto& r : vote.repairs) done.insert(r.faulty);

  std::set<std::size_t> seen;
  for (const auto& s : shares) {
    if (s.honest != vote.voter) {
      throw Error(ErrorCode::kUnexpectedShare, "share belongs to another voter");
    }
    if (done.count(s.faulty) != 0 || !seen.insert(s.faulty).second) {
      throw Error(ErrorCode::kDuplicateShare,
                  "duplicate share for faulty participant " + std::to_string(s.faulty));
    }
    if (expected.count(s.faulty) == 0) {
      throw Error(ErrorCode::kUnexpectedShare,
                  "participant " + std::to_string(s.faulty) + " is not faulty");
    }
  }
  if (seen != expected) {
    throw Error(ErrorCode::kUnexpectedShare, "shares do not cover the faulty set");
  }

  BlindedVote out = vote;
  Element value = vote.value;
  for (const auto& s : shares) {
    const ShareSign sign = share_sign(vote.voter, s.faulty);
    value = sign == ShareSign::kMultiply ? group.op(value, s.c)
                                         : group.op(value, group.inv(s.c));
    out.repairs.push_back({s.faulty, sign});
  }
  out.value = group.to_affine(value);
  return out;
}

Scalar fiat_shamir_challenge(Group& group, DomainTag tag,
                             std::span<const TranscriptItem> items) {
  if (items.empty()) throw Error(ErrorCode::kInvalidArgument, "empty transcript");
  Bytes buf{static_cast<std::uint8_t>(tag)};
  for (const auto& item : items) {
    Bytes b = std::visit([&](const auto& v) { return group.canonical_bytes(v); }, item);
    buf.insert(buf.end(), b.begin(), b.end());
  }
  group.count_hash();
  Bytes digest = sha256(buf);
  mpz_class v;
  mpz_import(v.get_mpz_t(), digest.size(), 1, 1, 1, 0, digest.data());
  return group.params().scalar(v);
}

Bytes encode_proof(Group& group, const MembershipProof& proof) {
  ByteWriter w;
  w.u8(kWireVersion);
  w.u16(static_cast<std::uint16_t>(proof.branches.size()));
  for (const auto& br : proof.branches) {
    w.raw(group.canonical_bytes(br.a));
    w.raw(group.canonical_bytes(br.b));
    w.raw(group.canonical_bytes(br.r));
    w.raw(group.canonical_bytes(br.d));
  }
  w.u16(static_cast<std::uint16_t>(proof.hints.size()));
  for (const auto& h : proof.hints) w.raw(group.field_bytes(h));
  return std::move(w).bytes();
}

MembershipProof decode_proof(const Group& group, std::span<const std::uint8_t> data) {
  const GroupParams& params = group.params();
  const std::size_t ew = params.backend == BackendKind::kIA ? params.element_width()
                                                            : 2 * params.element_width();
  const std::size_t sw = params.scalar_width();
  ByteReader r(data);
  if (r.u8() != kWireVersion) throw Error(ErrorCode::kMalformed, "unknown proof version");
  MembershipProof proof;
  const std::size_t k = r.u16();
  if (k != params.k) throw Error(ErrorCode::kMalformed, "proof branch count mismatch");
  for (std::size_t i = 0; i < k; ++i) {
    MembershipBranch br;
    br.a = group.decode_element(r.raw(ew));
    br.b = group.decode_element(r.raw(ew));
    br.r = group.decode_scalar(r.raw(sw));
    br.d = group.decode_scalar(r.raw(sw));
    proof.branches.push_back(std::move(br));
  }
  const std::size_t nh = r.u16();
  for (std::size_t i = 0; i < nh; ++i) {
    proof.hints.push_back(group.decode_field(r.raw(params.element_width())));
  }
  r.expect_done();
  return proof;
}

Bytes encode_share(Group& group, const RecoveryShare& share) {
  ByteWriter w;
  w.u8(kWireVersion);
  w.u32(static_cast<std::uint32_t>(share.honest));
  w.u32(static_cast<std::uint32_t>(share.faulty));
  w.u8(static_cast<std::uint8_t>(share.sign));
  w.raw(group.canonical_bytes(share.c));
  w.raw(group.canonical_bytes(share.r));
  w.raw(group.canonical_bytes(share.m1));
  w.raw(group.canonical_bytes(share.m2));
  w.u16(static_cast<std::uint16_t>(share.hints.size()));
  for (const auto& h : share.hints) w.raw(group.field_bytes(h));
  return std::move(w).bytes();
}

RecoveryShare decode_share(const Group& group, std::span<const std::uint8_t> data) {
  const GroupParams& params = group.params();
  const std::size_t ew = params.backend == BackendKind::kIA ? params.element_width()
                                                            : 2 * params.element_width();
  ByteReader r(data);
  if (r.u8() != kWireVersion) throw Error(ErrorCode::kMalformed, "unknown share version");
  RecoveryShare share;
  share.honest = r.u32();
  share.faulty = r.u32();
  const std::uint8_t sign = r.u8();
  if (sign > 1) throw Error(ErrorCode::kMalformed, "bad sign flag");
  share.sign = static_cast<ShareSign>(sign);
  share.c = group.decode_element(r.raw(ew));
  share.r = group.decode_scalar(r.raw(params.scalar_width()));
  share.m1 = group.decode_element(r.raw(ew));
  share.m2 = group.decode_element(r.raw(ew));
  const std::size_t nh = r.u16();
  for (std::size_t i = 0; i < nh; ++i) {
    share.hints.push_back(group.decode_field(r.raw(params.element_width())));
  }
  r.expect_done();
  return share;
}

}  // namespace bbbvote
