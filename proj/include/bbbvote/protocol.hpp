#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bbbvote/group.hpp"
#include "bbbvote/rng.hpp"

namespace bbbvote {

// Participant indices are 1-based positions in registration order.

struct EphemeralKeypair {
  Scalar secret;  // x_i
  Element pub;  // g^{x_i}, affine
};

EphemeralKeypair gen_keypair(Group& group, Rng& rng);
EphemeralKeypair keypair_from_secret(Group& group, const Scalar& secret);

struct MpcKey {
  std::size_t owner = 0;
  Element key;  // h_i = g^{y_i}
};

// h_owner = prod_{j<owner} X_j / prod_{j>owner} X_j, with no participant-count
// check. Exposed for the two-party privacy analysis; elections go through the
// mpc_keys_* functions.
Element compute_mpc_key(Group& group, std::span<const Element> pubkeys,
                        std::size_t owner);

// Independent per-participant products (the reference computation).
std::vector<MpcKey> mpc_keys_naive(Group& group, std::span<const Element> pubkeys);
// One inversion, then h_{i+1} = h_i X_i X_{i+1}: 3n - 4 multiplications.
std::vector<MpcKey> mpc_keys_cached(Group& group, std::span<const Element> pubkeys);

// Whether a recovery share's C is multiplied into the vote (faulty j > i,
// removing -x_i x_j) or its inverse is (j < i, removing +x_j x_i).
enum class ShareSign : std::uint8_t { kMultiply = 0, kInvert = 1 };
ShareSign share_sign(std::size_t honest, std::size_t faulty);

struct RepairEntry {
  std::size_t faulty = 0;
  ShareSign sign = ShareSign::kMultiply;
};

struct BlindedVote {
  std::size_t voter = 0;
  Element value;  // B_i, affine
  std::vector<RepairEntry> repairs;
};

Element blinding_key(Group& group, const Scalar& secret, const Element& mpc_key);
// B_i = h_i^{x_i} * f_choice. Throws kChoiceOutOfRange.
BlindedVote blind_vote(Group& group, std::size_t voter, const Scalar& secret,
                       const Element& mpc_key, unsigned choice);

struct MembershipBranch {
  Element a, b;
  Scalar r, d;
};

struct MembershipProof {
  std::vector<MembershipBranch> branches;  // one per choice
  // EC only: three inverse-Z hints per branch for the simultaneous-form
  // verifier (first condition, second condition left and right side).
  std::vector<mpz_class> hints;
};

struct RecoveryShare {
  std::size_t honest = 0;  // i
  std::size_t faulty = 0;  // j
  ShareSign sign = ShareSign::kMultiply;
  Element c;  // g^{x_i x_j}
  Scalar r;
  Element m1, m2;
  std::vector<mpz_class> hints;  // EC only: two per share
};

struct ProveOptions {
  bool inverse_hints = false;  // EC Jacobi only
};

struct VerifyOptions {
  // Rearranged checks evaluated with simul_exp. Required to consume hints.
  bool simultaneous = true;
};

struct Verdict {
  bool accepted = false;
  std::string reason;
  OpCounter cost;

  explicit operator bool() const { return accepted; }
};

MembershipProof prove_membership(Group& group, const Scalar& secret,
                                 const Element& mpc_key, const Element& vote,
                                 unsigned choice, Rng& rng, ProveOptions opts = {});

Verdict verify_membership(Group& group, const MembershipProof& proof,
                          const Element& pubkey, const Element& mpc_key,
                          const Element& vote, VerifyOptions opts = {});

RecoveryShare prove_pairwise_key(Group& group, std::size_t honest,
                                 const Scalar& secret, const Element& pubkey,
                                 std::size_t faulty, const Element& faulty_pubkey,
                                 Rng& rng, ProveOptions opts = {});

Verdict verify_pairwise_key(Group& group, const RecoveryShare& share,
                            const Element& pubkey, const Element& faulty_pubkey,
                            VerifyOptions opts = {});

// Inverts the faulty parties' key material out of a vote. Shares must be
// verified, belong to the vote's owner and cover faulty_set exactly.
BlindedVote repair_blinded_vote(Group& group, const BlindedVote& vote,
                                std::span<const RecoveryShare> shares,
                                std::span<const std::size_t> faulty_set);

enum class DomainTag : std::uint8_t { kMembership = 0x01, kRecovery = 0x02 };

using TranscriptItem = std::variant<Element, Scalar>;

// SHA-256(tag || canonical_bytes(items)...) reduced mod the exponent order.
Scalar fiat_shamir_challenge(Group& group, DomainTag tag,
                             std::span<const TranscriptItem> items);

// Wire formats: version byte 0x01, then fields in declaration order using
// canonical_bytes; counts are big-endian.
Bytes encode_proof(Group& group, const MembershipProof& proof);
MembershipProof decode_proof(const Group& group, std::span<const std::uint8_t> data);
Bytes encode_share(Group& group, const RecoveryShare& share);
RecoveryShare decode_share(const Group& group, std::span<const std::uint8_t> data);

}  // namespace bbbvote
