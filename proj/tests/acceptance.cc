// Copyright 2026 The SLU Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: one PASS/FAIL line per criterion, checked at its stated
// tolerance and runtime limit. Exits nonzero when any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "published_table.h"
#include "slu/common.h"
#include "slu/corpus.h"
#include "slu/crf.h"
#include "slu/eval.h"
#include "slu/features.h"
#include "slu/linear.h"
#include "slu/slu.h"
#include "slu/synthetic.h"

namespace slu {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome Fail(const std::string &detail) { return {false, detail}; }

std::string Format(const char *fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

// 1. Every published F1 follows from its precision and recall.
Outcome TableConsistency() {
  double worst = 0.0;
  for (const auto &t : published::kTable) {
    worst = std::max(worst, std::abs(F1FromPrecisionRecall(t.precision, t.recall) - t.f1));
    // The same through integer counts whose ratios are the published values.
    const int64_t p = std::llround(t.precision * 1e4), r = std::llround(t.recall * 1e4);
    const int64_t tp = p * r;
    worst = std::max(worst, std::abs(Prf1(tp, r * 10000 - tp, p * 10000 - tp).f1 - t.f1));
  }
  return {worst <= 5e-5, Format("12 triples, max |f1 - published| = %.2e (tol 5e-5)", worst)};
}

// 2. Forward-backward and Viterbi against enumeration.
Outcome CrfInference() {
  Rng rng(DeriveSeed(2, 0));
  double worst_logz = 0.0;
  int viterbi_mismatch = 0;
  for (int i = 0; i < 100; ++i) {
    const int T = 1 + static_cast<int>(UniformIndex(rng, 4));
    const int L = 1 + static_cast<int>(UniformIndex(rng, 3));
    const Lattice lat = oracle::RandomLattice(rng, T, L);
    worst_logz = std::max(worst_logz, std::abs(ForwardBackward(lat).log_partition -
                                               oracle::BruteLogPartition(lat)));
    viterbi_mismatch += Viterbi(lat).score != oracle::BruteMaxScore(lat);
  }
  return {worst_logz <= 1e-10 && viterbi_mismatch == 0,
          Format("100 lattices, max |logZ - brute| = %.2e (tol 1e-10), Viterbi mismatches = %.0f",
                 worst_logz, viterbi_mismatch)};
}

// 3. CRF gradient against central differences of an enumerated objective.
Outcome CrfGradient() {
  Rng rng(DeriveSeed(3, 0));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int F = 1 + static_cast<int>(UniformIndex(rng, 12));
    const int L = 1 + static_cast<int>(UniformIndex(rng, 3));
    CrfModel model;
    std::vector<std::string> names;
    for (int y = 0; y < L; ++y) model.label_names.push_back("y" + std::to_string(y));
    for (int f = 0; f < F; ++f) model.feature_names.push_back("f" + std::to_string(f));
    model.RebuildIndex();
    for (int k = 0; k < F * L; ++k) model.emission.push_back(2 * UniformReal(rng) - 1);
    for (int k = 0; k < L * L; ++k) model.transition.push_back(2 * UniformReal(rng) - 1);
    const int T = 1 + static_cast<int>(UniformIndex(rng, 5));
    CrfExample ex;
    oracle::IndexedSequence seq;
    for (int t = 0; t < T; ++t) {
      ex.features.emplace_back();
      seq.features.emplace_back();
      for (int f = 0; f < F; ++f) {
        if (UniformReal(rng) < 0.4) {
          ex.features.back().push_back(model.feature_names[f]);
          seq.features.back().push_back(f);
        }
      }
      ex.labels.push_back(static_cast<int>(UniformIndex(rng, L)));
    }
    seq.labels = ex.labels;
    const double l2 = 0.1;
    const NllResult r = NllAndGradient(model, {ex}, l2);
    std::vector<double> w = model.emission;
    w.insert(w.end(), model.transition.begin(), model.transition.end());
    const auto fd = oracle::FiniteDifferenceGradient(
        [&](const std::vector<double> &x) { return oracle::BruteCrfNll(x, F, L, {seq}, l2); }, w);
    for (size_t k = 0; k < w.size(); ++k) worst = std::max(worst, oracle::RelativeError(r.gradient[k], fd[k]));
  }
  return {worst <= 1e-4, Format("100 instances, max relative error = %.2e (tol 1e-4)", worst)};
}

// 4. Logistic gradient against central differences of a direct objective.
Outcome LogisticGradient() {
  Rng rng(DeriveSeed(4, 0));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int K = 2 + static_cast<int>(UniformIndex(rng, 3));
    const int D = 1 + static_cast<int>(UniformIndex(rng, 10));
    const int n = 1 + static_cast<int>(UniformIndex(rng, 6));
    std::vector<LabeledVector> data;
    std::vector<std::pair<std::vector<std::pair<int, double>>, int>> plain;
    for (int j = 0; j < n; ++j) {
      LabeledVector p;
      for (int d = 0; d < D; ++d) {
        if (UniformReal(rng) < 0.5) p.x.entries.push_back({d, 2 * UniformReal(rng) - 1});
      }
      p.label = static_cast<int>(UniformIndex(rng, K));
      data.push_back(p);
      plain.push_back({p.x.entries, p.label});
    }
    const double l2 = UniformReal(rng);
    std::vector<double> params(static_cast<size_t>(K) * (D + 1));
    for (double &v : params) v = 2 * UniformReal(rng) - 1;
    std::vector<double> grad(params.size());
    LogregObjective(params, data, K, D, l2, grad);
    const auto fd = oracle::FiniteDifferenceGradient(
        [&](const std::vector<double> &x) { return oracle::LogregValue(x, plain, K, D, l2); }, params);
    for (size_t k = 0; k < params.size(); ++k) worst = std::max(worst, oracle::RelativeError(grad[k], fd[k]));
  }
  return {worst <= 1e-4, Format("100 instances, max relative error = %.2e (tol 1e-4)", worst)};
}

int RunCli(const std::string &args) {
  const std::string cmd = std::string(SLU_CLI_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 5. gen -> train -> predict -> eval through the command-line tool, scored
// on a held-out generated corpus.
Outcome SemanticEndToEnd(const fs::path &dir) {
  const std::string train = (dir / "train.json").string(), test = (dir / "test.json").string();
  const std::string ont = (dir / "ontology.json").string(), model = (dir / "sem.model").string();
  const std::string pred = (dir / "pred.json").string(), report = (dir / "report.json").string();
  if (RunCli("gen --dialogs 120 --seed 11 --out " + train + " --ontology " + ont) != 0 ||
      RunCli("gen --dialogs 60 --seed 12 --out " + test) != 0) {
    return Fail("gen failed");
  }
  const Ontology o = LoadOntology(ont);
  int with_sub = 0, with_rel = 0, with_ft = 0;
  for (const auto &[main, e] : o) {
    with_sub += !e.subcategories.empty();
    with_rel += !e.relative_modifiers.empty();
    with_ft += !e.from_to_modifiers.empty();
  }
  const Corpus gold = LoadCorpus(test);
  std::set<std::string> mains;
  int segments = 0;
  for (const auto &d : gold.dialogs) {
    for (const auto &u : d.utterances) {
      for (const auto &s : u.segments) mains.insert(s.main), ++segments;
    }
  }
  if (mains.size() < 4 || with_rel == 0 || with_ft == 0 || with_sub == 0) {
    return Fail("generated corpus lacks the required category coverage");
  }
  if (RunCli("train --task semantic --corpus " + train + " --ontology " + ont + " --out " + model) != 0 ||
      RunCli("predict --model " + model + " --corpus " + test + " --out " + pred) != 0 ||
      RunCli("eval --task semantic --corpus " + test + " --pred " + pred + " --out " + report) != 0) {
    return Fail("command-line pipeline failed");
  }
  const auto doc = nlohmann::json::parse(ReadFile(report));
  const double f1 = doc["rows"][0]["OVERALL"]["f1"].get<double>();
  std::ostringstream detail;
  detail << "120 train / 60 held-out dialogs, " << mains.size() << " main categories, " << segments
         << " gold segments, overall F1 = " << f1 << " (need >= 0.99)";
  return {f1 >= 0.99, detail.str()};
}

// 6. Speech-act systems on a held-out generated corpus.
Outcome SpeechActEndToEnd() {
  SyntheticOptions opts;
  opts.seed = 21;
  const Corpus train = GenerateSyntheticCorpus(opts);
  opts.seed = 22;
  const Corpus test = GenerateSyntheticCorpus(opts);
  SpeechActHyperparams hp;
  bool ok = true;
  std::ostringstream detail;
  for (SystemId s : {SystemId::kS3, SystemId::kS5, SystemId::kS2, SystemId::kS4}) {
    const SpeechActModel m = TrainSpeechActSystem(train, s, hp, 1);
    Corpus pred = test;
    for (auto &d : pred.dialogs) {
      const auto labels = PredictSpeechActs(m, d);
      for (size_t i = 0; i < labels.size(); ++i) d.utterances[i].speech_acts = {labels[i]};
    }
    const bool forest = s == SystemId::kS2 || s == SystemId::kS4;
    const double f1 = EvalSpeechActCorpora(test, pred, forest).overall.Scores().f1;
    const double need = forest ? 0.90 : 0.95;
    ok &= f1 >= need;
    if (s != SystemId::kS3) detail << "; ";
    detail << SystemName(s) << (forest ? " category" : "") << " F1 = " << Format("%.4f", f1)
           << " (need >= " << need << ")";
  }
  return {ok, detail.str()};
}

// 7. Random decodings never emit an attribute outside the ontology.
Outcome OntologySafety() {
  const Ontology ont = SyntheticOntology();
  std::vector<std::string> values;
  for (const auto &[main, e] : ont) {
    values.push_back(main);
    for (const auto *s : {&e.subcategories, &e.relative_modifiers, &e.from_to_modifiers}) {
      values.insert(values.end(), s->begin(), s->end());
    }
  }
  // Values outside the ontology must be filtered as well.
  values.push_back("UNLISTED");
  Rng rng(DeriveSeed(7, 0));
  auto random_bio = [&](int n) {
    std::vector<std::string> bio;
    for (int t = 0; t < n; ++t) {
      const size_t r = UniformIndex(rng, 3);
      bio.push_back(r == 0 ? "O" : (r == 1 ? "B-" : "I-") + values[UniformIndex(rng, values.size())]);
    }
    return bio;
  };
  auto violations = [&](const std::vector<SemanticSegment> &segs) {
    int bad = 0;
    for (const auto &s : segs) {
      for (AttributeKind kind : {AttributeKind::kSub, AttributeKind::kRel, AttributeKind::kFromTo}) {
        if (auto v = SegmentValue(s, kind)) {
          const auto *allowed = AdmissibleValues(ont, s.main, kind);
          bad += allowed == nullptr || allowed->count(*v) == 0;
        }
      }
    }
    return bad;
  };
  int bad = 0, emitted = 0;
  // Half the cases combine independent random BIO channels.
  for (int i = 0; i < 5000; ++i) {
    const int n = 1 + static_cast<int>(UniformIndex(rng, 10));
    const auto segs = CombineAttributeTags(random_bio(n), random_bio(n), random_bio(n), random_bio(n), ont);
    bad += violations(segs);
    emitted += static_cast<int>(segs.size());
  }
  // The rest decode random utterances with randomly weighted CRFs whose label
  // sets span every ontology value.
  SemanticModel model;
  model.ontology = ont;
  std::vector<std::string> words;
  for (int w = 0; w < 20; ++w) words.push_back("w" + std::to_string(w));
  std::vector<std::string> feature_names;
  for (const auto &w : words) {
    for (int o = -3; o <= 3; ++o) feature_names.push_back(std::to_string(o) + ":lower=" + w);
  }
  for (int m = 0; m < 50; ++m) {
    for (auto &crf : model.crfs) {
      crf.label_names.clear();
      crf.label_names.push_back("O");
      for (const auto &v : values) {
        crf.label_names.push_back("B-" + v);
        crf.label_names.push_back("I-" + v);
      }
      crf.feature_names = feature_names;
      crf.RebuildIndex();
      crf.emission.resize(feature_names.size() * crf.label_names.size());
      crf.transition.resize(crf.label_names.size() * crf.label_names.size());
      for (double &w : crf.emission) w = 4 * UniformReal(rng) - 2;
      for (double &w : crf.transition) w = 2 * UniformReal(rng) - 1;
    }
    for (int u = 0; u < 100; ++u) {
      std::vector<std::string> toks;
      const int n = 1 + static_cast<int>(UniformIndex(rng, 10));
      for (int t = 0; t < n; ++t) toks.push_back(words[UniformIndex(rng, words.size())]);
      const auto segs = PredictSegments(model, oracle::MakeUtterance(toks));
      bad += violations(segs);
      emitted += static_cast<int>(segs.size());
    }
  }
  std::ostringstream detail;
  detail << "10000 decodings, " << emitted << " segments, " << bad << " ontology violations";
  return {bad == 0, detail.str()};
}

// 8. segments_to_bio followed by bio_to_spans is the identity per kind.
Outcome BioRoundTrip() {
  Rng rng(DeriveSeed(8, 0));
  const char *vals[] = {"A", "B", "C", "D"};
  int failures = 0, spans = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(UniformIndex(rng, 12));
    Utterance u = oracle::MakeUtterance(std::vector<std::string>(n, "w"));
    // Non-overlapping spans per kind, built left to right with random gaps.
    std::array<std::vector<Span>, 4> per_kind;
    for (int k = 0; k < 4; ++k) {
      int t = static_cast<int>(UniformIndex(rng, 3));
      while (t < n) {
        const int len = 1 + static_cast<int>(UniformIndex(rng, 3));
        const int end = std::min(n, t + len);
        per_kind[k].push_back({t, end, vals[UniformIndex(rng, 4)]});
        t = end + static_cast<int>(UniformIndex(rng, 3));
      }
    }
    for (const auto &s : per_kind[0]) u.segments.push_back({s.start, s.end, s.value, {}, {}, {}});
    // Other kinds ride on their own segments with a main value; give MAIN a
    // disjoint home by reusing MAIN spans only when the span matches.
    for (int k = 1; k < 4; ++k) {
      for (const auto &s : per_kind[k]) {
        auto it = std::find_if(u.segments.begin(), u.segments.end(), [&](const SemanticSegment &g) {
          return g.start == s.start && g.end == s.end;
        });
        if (it == u.segments.end()) continue;
        auto &slot = k == 1 ? it->sub : (k == 2 ? it->rel : it->from_to);
        if (!slot) slot = s.value;
      }
    }
    for (AttributeKind kind : kAllKinds) {
      std::vector<Span> expected;
      for (const auto &seg : u.segments) {
        if (auto v = SegmentValue(seg, kind)) expected.push_back({seg.start, seg.end, *v});
      }
      std::sort(expected.begin(), expected.end());
      spans += static_cast<int>(expected.size());
      failures += BioToSpans(SegmentsToBio(u, kind)) != expected;
    }
  }
  std::ostringstream detail;
  detail << "10000 utterances, " << spans << " spans, " << failures << " mismatches";
  return {failures == 0, detail.str()};
}

// 9. Byte-identical retraining and prediction-preserving persistence.
Outcome DeterminismAndPersistence(const fs::path &dir) {
  SyntheticOptions opts;
  opts.num_dialogs = 30;
  opts.seed = 31;
  const Corpus train = GenerateSyntheticCorpus(opts);
  opts.seed = 32;
  const Corpus probe = GenerateSyntheticCorpus(opts);
  const RuleSet rules = LoadRuleset(std::string(SLU_SOURCE_DIR) + "/data/rules/default_rules.json");
  SpeechActHyperparams hp;
  int identical = 0, total = 0, same_predictions = 0;
  auto check_files = [&](const AnyModel &a, const AnyModel &b, const std::string &name) {
    const std::string pa = (dir / (name + "_a.model")).string(), pb = (dir / (name + "_b.model")).string();
    SaveModel(a, pa);
    SaveModel(b, pb);
    identical += ReadFile(pa) == ReadFile(pb);
    ++total;
    return LoadModel(pa);
  };
  for (SystemId s : {SystemId::kS1, SystemId::kS2, SystemId::kS3, SystemId::kS4, SystemId::kS5}) {
    const SpeechActModel m = TrainSpeechActSystem(train, s, hp, 5, &rules);
    const AnyModel back = check_files(m, TrainSpeechActSystem(train, s, hp, 5, &rules), SystemName(s));
    bool same = true;
    for (const auto &d : probe.dialogs) {
      same &= PredictSpeechActs(std::get<SpeechActModel>(back), d) == PredictSpeechActs(m, d);
    }
    same_predictions += same;
  }
  const SemanticModel sem = TrainSemanticTagger(train, SyntheticOntology(), {});
  const AnyModel back = check_files(sem, TrainSemanticTagger(train, SyntheticOntology(), {}), "semantic");
  bool same = true;
  for (const auto &d : probe.dialogs) {
    for (const auto &u : d.utterances) {
      same &= PredictSegments(std::get<SemanticModel>(back), u) == PredictSegments(sem, u);
    }
  }
  same_predictions += same;
  std::ostringstream detail;
  detail << identical << "/" << total << " byte-identical retrains, " << same_predictions << "/" << total
         << " reloaded models predict identically";
  return {identical == total && same_predictions == total, detail.str()};
}

// 10. The vocabulary cap and top-k selection against a brute-force ranking.
Outcome VocabularyCap() {
  Rng rng(DeriveSeed(10, 0));
  // Zipf-like word draws give many distinct grams with plenty of count ties.
  Corpus big;
  for (int d = 0; d < 40; ++d) {
    Dialog dialog{"v" + std::to_string(d), {}};
    for (int i = 0; i < 20; ++i) {
      std::vector<std::string> words;
      for (int w = 0; w < 8; ++w) {
        const double u = UniformReal(rng);
        words.push_back("t" + std::to_string(static_cast<int>(std::floor(std::pow(400.0, u)))));
      }
      Utterance u = oracle::MakeUtterance(words);
      u.index = i;
      dialog.utterances.push_back(u);
    }
    big.dialogs.push_back(dialog);
  }
  const auto counts = oracle::CountGrams(big);
  const Vocabulary v = BuildNgramVocab(big, 5000);
  const bool big_ok = counts.size() > 5000 && v.size() == 5000 && v.grams() == oracle::TopGrams(counts, 5000);

  Corpus small = big;
  small.dialogs.resize(2);
  const auto small_counts = oracle::CountGrams(small);
  bool small_ok = true;
  for (size_t cap : {size_t{1}, size_t{10}, size_t{57}, small_counts.size()}) {
    small_ok &= BuildNgramVocab(small, cap).grams() == oracle::TopGrams(small_counts, cap);
  }
  std::ostringstream detail;
  detail << counts.size() << " distinct grams -> " << v.size()
         << " kept (cap 5000), top-k matches brute force: " << (big_ok ? "yes" : "no")
         << "; small-corpus caps match: " << (small_ok ? "yes" : "no");
  return {big_ok && small_ok, detail.str()};
}

struct Criterion {
  const char *name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace slu

int main() {
  using namespace slu;
  const fs::path dir = fs::temp_directory_path() / ("slu_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::vector<Criterion> criteria = {
      {"1 published table consistency", 1, TableConsistency},
      {"2 CRF inference oracle", 10, CrfInference},
      {"3 CRF gradient", 30, CrfGradient},
      {"4 logistic gradient", 10, LogisticGradient},
      {"5 end-to-end semantic tagging", 120, [&] { return SemanticEndToEnd(dir); }},
      {"6 end-to-end speech acts", 120, SpeechActEndToEnd},
      {"7 ontology safety", 10, OntologySafety},
      {"8 BIO round trip", 10, BioRoundTrip},
      {"9 determinism and persistence", 60, [&] { return DeterminismAndPersistence(dir); }},
      {"10 vocabulary cap", 10, VocabularyCap},
  };
  int failed = 0;
  for (const auto &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception &e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = out.pass && in_time;
    failed += !pass;
    std::printf("[%s] %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.name,
                out.detail.c_str(), secs, c.limit_seconds, in_time ? "" : " TIME LIMIT EXCEEDED");
    std::fflush(stdout);
  }
  fs::remove_all(dir);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
