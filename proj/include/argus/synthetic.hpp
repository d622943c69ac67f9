#pragma once

#include <random>
#include <string>
#include <vector>

#include "argus/core.hpp"

namespace argus {

// Random judged instance for oracle audits and fuzzing.  Verdicts lean
// entailed and entailed dynamic actions usually resolve, so ordering
// interactions (the interesting regime) appear often; unresolved evidence
// and every type/verdict combination still occur.
inline std::vector<JudgedTarget> synthetic_instance(std::mt19937_64& rng, int n, int m) {
  std::uniform_int_distribution<int> type_pick(0, 2);
  std::uniform_int_distribution<int> verdict_pick(0, 3);  // EN twice as likely
  std::uniform_int_distribution<int> column_pick(1, m);
  std::uniform_int_distribution<int> resolve_pick(0, 4);  // 1-in-5 unresolved
  std::vector<JudgedTarget> judged;
  judged.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    JudgedTarget t;
    t.sentence = {i, "synthetic sentence " + std::to_string(i)};
    t.stype = static_cast<SentenceType>(type_pick(rng));
    int v = verdict_pick(rng);
    t.verdict = v <= 1 ? Verdict::EN : (v == 2 ? Verdict::CON : Verdict::UD);
    if (t.verdict == Verdict::EN && t.stype == SentenceType::DA && resolve_pick(rng) != 0)
      t.evidence_index = column_pick(rng);
    judged.push_back(std::move(t));
  }
  return judged;
}

}  // namespace argus
