#pragma once

#include <cstdint>
#include <string>

#include "delicoco/numkit.hpp"

namespace delicoco {

enum class CompressorKind { identity, top_k, rand_k, rand2, qsgd };

// A contraction compressor and its parameter: fraction of kept coordinates
// for top_k/rand_k, keep-probability for rand2, bit width for qsgd.
// The contraction factor omega depends on the message dimension, so it is
// computed by omega_of rather than stored here.
struct CompressorSpec {
  CompressorKind kind = CompressorKind::identity;
  double param = 0.0;
};

// Config syntax: "identity", "top:0.05", "rand:0.05", "rand2:0.5", "qsgd:2".
CompressorSpec parse_compressor(const std::string& s);
std::string to_string(const CompressorSpec& spec);

// Number of kept coordinates for a fraction-parameterized sparsifier.
int sparsifier_k(double fraction, int d);

// Contraction factor omega in (0, 1]:
//   top_k/rand_k: k/d with k = max(1, round(fraction*d))
//   rand2:        p
//   qsgd:         1/w with w = 1 + min(sqrt(d)/2^b, d/2^(2b))
//   identity:     1
double omega_of(const CompressorSpec& spec, int d);

void validate_compressor(const CompressorSpec& spec);

// Applies the compressor to x. Randomized kinds (rand_k, rand2, qsgd) draw
// from rng; deterministic kinds ignore it. The zero vector maps to the zero
// vector for every kind. top_k breaks magnitude ties by keeping the lowest
// index.
Vector compress(const CompressorSpec& spec, const Vector& x, SeededRng& rng);

enum class BitCostMode { nominal, exact };

BitCostMode bit_cost_mode_from_string(const std::string& s);
std::string to_string(BitCostMode mode);

// Bits charged for one compressed message of dimension d.
//
// nominal (the budget-pairing convention: cost proportional to what the
// operator keeps):
//   top_k/rand_k: k*32     rand2: round(p*d*32)   qsgd: d*b   identity: d*32
// exact (adds indices and metadata):
//   top_k/rand_k: k*(32 + ceil(log2 d))   qsgd: 32 + d*(b+1)
//   rand2: round(1 + p*d*32)              identity: d*32
//
// rand2 is charged its expected size in both modes so that cumulative bit
// counts are deterministic.
std::int64_t message_bits(const CompressorSpec& spec, int d, BitCostMode mode);

}  // namespace delicoco
