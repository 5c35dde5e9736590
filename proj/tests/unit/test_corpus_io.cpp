#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "dyadic/corpus_io.hpp"
#include "dyadic/error.hpp"
#include "dyadic/synth.hpp"
#include "test_support.hpp"

using namespace dyadic;
using dyadic::testing::make_record;
using dyadic::testing::record_json;
using nlohmann::json;

namespace {

std::string lines(std::initializer_list<json> records) {
  std::string out;
  for (const json& r : records) out += r.dump() + "\n";
  return out;
}

Corpus read_text(const std::string& text) {
  std::istringstream in(text);
  return read_corpus(in);
}

std::size_t schema_error_line(const std::string& text) {
  try {
    read_text(text);
  } catch (const SchemaError& e) {
    return e.line();
  }
  return 0;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST(CorpusIo, OneCoupleBothPartners) {
  const Corpus c = read_text(lines({record_json("c1", "m"), record_json("c1", "f")}));
  ASSERT_EQ(c.dyads.size(), 1u);
  EXPECT_TRUE(c.dyads[0].male.has_value());
  EXPECT_TRUE(c.dyads[0].female.has_value());
  EXPECT_EQ(c.dyads[0].male->linguistic.size(), 768u);
  EXPECT_EQ(c.dyads[0].female->paralinguistic.size(), 176u);
  EXPECT_EQ(c.dyads[0].male->label, 1);  // filled in from items 2,3
}

TEST(CorpusIo, ShortLinguisticBlockNamesLineAndLength) {
  const std::string text = lines({record_json("c1", "m"), record_json("c1", "f", 767)});
  try {
    read_text(text);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("768"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(CorpusIo, DuplicateIdentityRejected) {
  const std::string text = lines({record_json("c1", "m"), record_json("c2", "f"), record_json("c1", "m")});
  try {
    read_text(text);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos) << e.what();
  }
}

TEST(CorpusIo, BlankLinesSkippedButCounted) {
  const std::string text = "\n" + record_json("c1", "m").dump() + "\n\n" +
                           record_json("c1", "f", 768, 100).dump() + "\n";
  EXPECT_EQ(schema_error_line(text), 4u);
}

TEST(CorpusIo, EmptyFileIsEmptyCorpus) {
  const Corpus c = read_text("\n\n");
  EXPECT_TRUE(c.dyads.empty());
  try {
    corpus_stats(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCorpus);
  }
}

TEST(CorpusIo, LabelKeyMustAgreeWithItems) {
  json ok = record_json("c1", "m", 768, 176, 4, 3);
  ok["label"] = 0;
  EXPECT_NO_THROW(read_text(lines({ok})));
  json bad = ok;
  bad["label"] = 1;
  EXPECT_EQ(schema_error_line(lines({bad})), 1u);
}

// Every single-field corruption of a valid record must be rejected with
// the record's line number.
TEST(CorpusIo, SingleFieldCorruptionsRejected) {
  const json valid = record_json("c7", "f");
  std::vector<json> broken;
  auto corrupt = [&](auto&& mutate) {
    json r = valid;
    mutate(r);
    broken.push_back(r);
  };
  corrupt([](json& r) { r.erase("couple_id"); });
  corrupt([](json& r) { r["couple_id"] = 7; });
  corrupt([](json& r) { r["couple_id"] = ""; });
  corrupt([](json& r) { r.erase("role"); });
  corrupt([](json& r) { r["role"] = "x"; });
  corrupt([](json& r) { r["role"] = "male"; });
  corrupt([](json& r) { r.erase("linguistic"); });
  corrupt([](json& r) { r["linguistic"] = "none"; });
  corrupt([](json& r) { r["linguistic"].erase(0); });
  corrupt([](json& r) { r["linguistic"].push_back(0.0); });
  corrupt([](json& r) { r["linguistic"][10] = "1.0"; });
  corrupt([](json& r) { r["linguistic"][10] = nullptr; });
  corrupt([](json& r) { r.erase("paralinguistic"); });
  corrupt([](json& r) { r["paralinguistic"].erase(175); });
  corrupt([](json& r) { r["paralinguistic"][3] = json::array(); });
  corrupt([](json& r) { r.erase("mdmq"); });
  corrupt([](json& r) { r["mdmq"] = 3; });
  corrupt([](json& r) { r["mdmq"].erase("good_bad"); });
  corrupt([](json& r) { r["mdmq"].erase("happy_sad"); });
  corrupt([](json& r) { r["mdmq"]["good_bad"] = 0; });
  corrupt([](json& r) { r["mdmq"]["good_bad"] = 7; });
  corrupt([](json& r) { r["mdmq"]["happy_sad"] = 2.5; });
  corrupt([](json& r) { r["mdmq"]["relaxed_angry"] = 9; });
  corrupt([](json& r) { r["mdmq"]["calm_stressed"] = 0; });
  corrupt([](json& r) { r["mdmq"]["extra"] = 1; });
  corrupt([](json& r) { r["label"] = 0; });
  corrupt([](json& r) { r["label"] = 2; });
  corrupt([](json& r) { r["label"] = "1"; });
  corrupt([](json& r) { r["unexpected"] = true; });

  for (std::size_t i = 0; i < broken.size(); ++i) {
    const std::string text = lines({record_json("c1", "m"), broken[i]});
    EXPECT_EQ(schema_error_line(text), 2u) << "corruption #" << i << ": " << broken[i].dump().substr(0, 120);
  }
}

TEST(CorpusIo, MalformedJsonAndNonFiniteRejected) {
  const std::string good = record_json("c1", "m").dump();
  EXPECT_EQ(schema_error_line(good + "\n{not json\n"), 2u);
  EXPECT_EQ(schema_error_line(good.substr(0, good.size() - 1) + "\n"), 1u);
  std::string overflow = record_json("c2", "m").dump();
  const auto pos = overflow.find("-0.3");
  ASSERT_NE(pos, std::string::npos);
  overflow.replace(pos, 4, "1e999");
  EXPECT_EQ(schema_error_line(good + "\n" + overflow + "\n"), 2u);
}

TEST(CorpusIo, LoadMissingFileIsIoError) {
  try {
    load_corpus("/nonexistent/dir/features.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(CorpusIo, RoundTripIsBitExact) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::uint64_t> bits;
  Corpus c;
  for (int k = 0; k < 5; ++k) {
    const std::string id = "couple-" + std::to_string(k);
    PartnerRecord m = make_record(id, Role::Male, 1 + k % 6, 6 - k % 6, 10 + k);
    std::vector<double> ling(m.linguistic.values().begin(), m.linguistic.values().end());
    // Awkward values: random bit patterns (finite only), extremes, signed zero.
    for (std::size_t i = 0; i < 200; ++i) {
      double x;
      do {
        const std::uint64_t b = bits(rng);
        std::memcpy(&x, &b, sizeof(double));
      } while (!std::isfinite(x));
      ling[i] = x;
    }
    ling[200] = -0.0;
    ling[201] = std::numeric_limits<double>::denorm_min();
    ling[202] = std::numeric_limits<double>::max();
    ling[203] = std::numeric_limits<double>::lowest();
    ling[204] = 1e20;
    ling[205] = 18446744073709551616.0;
    ling[206] = 0.1;
    ling[207] = 3.0;
    m.linguistic = FeatureVector(BlockKind::Linguistic, ling);
    m.mdmq.relaxed_angry = 1 + k % 6;
    DyadRecord d{id, m, std::nullopt};
    if (k % 2 == 0) d.female = make_record(id, Role::Female, 3, 4, 50 + k);
    c.dyads.push_back(d);
  }
  std::ostringstream out;
  write_corpus(c, out);
  std::istringstream in(out.str());
  const Corpus back = read_corpus(in);
  ASSERT_EQ(back.dyads.size(), c.dyads.size());
  for (std::size_t d = 0; d < c.dyads.size(); ++d) {
    for (Role role : kRoles) {
      const auto& a = c.dyads[d].partner(role);
      const auto& b = back.dyads[d].partner(role);
      ASSERT_EQ(a.has_value(), b.has_value());
      if (!a) continue;
      EXPECT_EQ(a->mdmq, b->mdmq);
      EXPECT_EQ(a->label, b->label);
      for (std::size_t i = 0; i < kLinguisticDim; ++i) {
        ASSERT_TRUE(bit_equal(a->linguistic[i], b->linguistic[i])) << d << " ling " << i;
      }
      for (std::size_t i = 0; i < kParalinguisticDim; ++i) {
        ASSERT_TRUE(bit_equal(a->paralinguistic[i], b->paralinguistic[i])) << d << " para " << i;
      }
    }
  }
  // Writing the re-read corpus reproduces the same bytes.
  std::ostringstream again;
  write_corpus(back, again);
  EXPECT_EQ(out.str(), again.str());
}

TEST(CorpusStats, PresetCounts) {
  const CorpusStats s = corpus_stats(generate_corpus(paper_shaped_preset()));
  EXPECT_EQ(s.couples, 368u);
  EXPECT_EQ(s.male.samples, 341u);
  EXPECT_EQ(s.female.samples, 338u);
}

TEST(CorpusStats, HandBuiltCounts) {
  Corpus c;
  for (int k = 0; k < 4; ++k) {
    const std::string id = "c" + std::to_string(k);
    c.dyads.push_back({id, make_record(id, Role::Male, 1, 2), make_record(id, Role::Female, 2, 2)});
  }
  CorpusStats s = corpus_stats(c);
  EXPECT_EQ(s.male.negatives, 0u);
  EXPECT_EQ(s.female.negatives, 0u);
  EXPECT_EQ(s.male.samples, 4u);

  for (auto& d : c.dyads) d.female.reset();
  s = corpus_stats(c);
  EXPECT_EQ(s.female.samples, 0u);
  EXPECT_EQ(s.male.samples, 4u);

  EXPECT_THROW(corpus_stats(Corpus{}), Error);
}

TEST(CorpusIo, AdapterFixtureValidates) {
  const Corpus c = load_corpus(std::filesystem::path(DYADIC_FIXTURE_DIR) / "adapter_two_couples.jsonl");
  ASSERT_EQ(c.dyads.size(), 2u);
  for (const DyadRecord& d : c.dyads) {
    for (Role role : kRoles) {
      ASSERT_TRUE(d.partner(role).has_value());
      EXPECT_EQ(d.partner(role)->linguistic.size(), 768u);
      EXPECT_EQ(d.partner(role)->paralinguistic.size(), 176u);
    }
  }
}
