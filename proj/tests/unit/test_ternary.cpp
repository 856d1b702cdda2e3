#include "core/ternary.hpp"

#include "doctest.h"

using namespace rdtlgn;

TEST_CASE("numerical ordering is the restriction of <=") {
  CHECK(leq_numerical(-1, 0));
  CHECK(leq_numerical(+1, +1));
  CHECK_FALSE(leq_numerical(+1, -1));
  CHECK(leq_numerical(-1, +1));
}

TEST_CASE("information ordering: 0 below both, +-1 incomparable") {
  CHECK(leq_information(0, +1));
  CHECK(leq_information(0, -1));
  CHECK(leq_information(0, 0));
  CHECK_FALSE(leq_information(-1, +1));
  CHECK_FALSE(leq_information(+1, -1));
  CHECK_FALSE(leq_information(+1, 0));
}

TEST_CASE("information ordering is a partial order") {
  const Trit ts[3] = {-1, 0, +1};
  for (Trit a : ts) CHECK(leq_information(a, a));
  for (Trit a : ts)
    for (Trit b : ts)
      if (leq_information(a, b) && leq_information(b, a)) CHECK(a == b);
  for (Trit a : ts)
    for (Trit b : ts)
      for (Trit c : ts)
        if (leq_information(a, b) && leq_information(b, c)) CHECK(leq_information(a, c));
}

TEST_CASE("gate id round-trip is the identity for all 19683 ids") {
  for (int id = 0; id < GATE_COUNT; ++id)
    CHECK(encode_gate(decode_gate(static_cast<GateId>(id))) == id);
}

TEST_CASE("kleene gates match min/max/negation and the documented ids") {
  GateTable g_and = kleene_and();
  GateTable g_or = kleene_or();
  const Trit ts[3] = {-1, 0, +1};
  for (Trit a : ts)
    for (Trit b : ts) {
      CHECK(g_and.apply(a, b) == std::min(a, b));
      CHECK(g_or.apply(a, b) == std::max(a, b));
    }
  // base-3 encodings under the documented index ordering
  CHECK(encode_gate(g_and) == 15633);
  CHECK(encode_gate(g_or) == 19569);

  CHECK(g_and.apply(0, -1) == -1);
  CHECK(g_or.apply(0, +1) == +1);
  CHECK(kleene_not_first().apply(0, +1) == 0);
  CHECK(kleene_not_first().apply(-1, 0) == +1);
}

TEST_CASE("classify_gate on the named gates") {
  GateClass c_and = classify_gate(kleene_and());
  CHECK(c_and.is_nm);
  CHECK(c_and.is_im);
  CHECK_FALSE(c_and.is_constant);

  GateClass c_not = classify_gate(kleene_not_first());
  CHECK_FALSE(c_not.is_nm);
  CHECK(c_not.is_im);
  CHECK_FALSE(c_not.is_constant);

  GateClass c_const = classify_gate(constant_gate(0));
  CHECK(c_const.is_nm);
  CHECK(c_const.is_im);
  CHECK(c_const.is_constant);

  CHECK(classify_gate(projection_first()).is_nm);
  CHECK(classify_gate(projection_first()).is_im);
  CHECK(classify_gate(projection_second()).is_im);
}

TEST_CASE("vocabulary census") {
  CHECK(enumerate_vocabulary({VocabularyTag::Full, false}).size() == 19683);
  auto nm = enumerate_vocabulary({VocabularyTag::NM, false});
  auto im = enumerate_vocabulary({VocabularyTag::IM, false});
  auto both = enumerate_vocabulary({VocabularyTag::NMAndIM, false});
  CHECK(nm.size() == 175);
  CHECK(im.size() == 197);
  CHECK(both.size() == 20);
  CHECK(enumerate_vocabulary({VocabularyTag::NM, true}).size() == 172);
  CHECK(enumerate_vocabulary({VocabularyTag::IM, true}).size() == 194);
  CHECK(enumerate_vocabulary({VocabularyTag::NMAndIM, true}).size() == 17);

  // lists are ascending and contain AND/OR
  CHECK(std::is_sorted(nm.begin(), nm.end()));
  GateId id_and = encode_gate(kleene_and());
  GateId id_or = encode_gate(kleene_or());
  for (const auto& v : {nm, im, both}) {
    CHECK(std::find(v.begin(), v.end(), id_and) != v.end());
    CHECK(std::find(v.begin(), v.end(), id_or) != v.end());
  }
}

TEST_CASE("every non-constant IM gate maps (0,0) to 0") {
  for (GateId id : enumerate_vocabulary({VocabularyTag::IM, true})) {
    GateTable g = decode_gate(id);
    CHECK(g.apply(0, 0) == 0);
  }
}

TEST_CASE("hamming distance") {
  GateTable g = kleene_and();
  CHECK(hamming_distance(g, g) == 0);
  CHECK(hamming_distance(kleene_and(), kleene_or()) == 6);
  CHECK(hamming_distance(constant_gate(-1), constant_gate(+1)) == 9);
}
