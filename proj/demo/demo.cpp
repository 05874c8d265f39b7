// Walk-through: build a few encodings, verify them, and compare their
// lengths with certified lower bounds.

#include <iostream>

#include "ipe/ipe.hpp"

int main() {
  using namespace ipe;

  // GT_6 modulo 30: length ceil(6/3) = 2 through INDEX => GT.
  const Modulus m30 = factorize(30);
  const Encoding gt = encode_gt(6, m30);
  const auto gt_report = verify(Predicate::gt(6), gt);
  const Certificate gt_bound = builtin_bound(Predicate::gt(6), m30);
  std::cout << "GT_6 mod 30: length " << gt.length << ", mismatches " << gt_report.mismatches.size()
            << ", lower bound " << gt_bound.bound << " (" << to_string(gt_bound.method) << ")\n";

  // DISJ_4 with two primes picked by the tower.
  const DisjointnessEncoding disj = encode_disj(4, 2);
  std::cout << "DISJ_4: q = " << disj.modulus.q() << " = " << disj.modulus.factors()[0] << " * "
            << disj.modulus.factors()[1] << ", length " << disj.encoding.length << ", mismatches "
            << verify(Predicate::disj(4), disj.encoding).mismatches.size() << "\n";

  // Exact minimum rank of the EQ_4 pattern over Z_2.
  std::cout << "min rank EQ_4 over Z_2: " << min_rank_oracle(zero_pattern(Predicate::eq(4)), 2) << "\n";

  // An encoding read off a matrix: J_3 - I_3 represents EQ_3 modulo 2.
  const ZqMatrix f = ZqMatrix::from_rows(2, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  const Encoding eq3 = encode_from_matrix(Predicate::eq(3), f, 2);
  std::cout << "EQ_3 from J-I mod 2: length " << eq3.length << ", mismatches "
            << verify(Predicate::eq(3), eq3).mismatches.size() << "\n";

  // Randomized EQ: exact worst-pair error of the bucket construction.
  const auto pe = rand_encode_eq(1024, 7, Eps::parse("1/8"));
  const ErrorReport rep = exact_error(pe);
  std::cout << "randomized EQ_1024: length " << pe.max_length << ", worst-pair error " << rep.worst_pair_error
            << "\n";
  return 0;
}
