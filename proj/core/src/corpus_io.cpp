#include "dyadic/corpus_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "dyadic/error.hpp"
#include "dyadic/labeling.hpp"

namespace dyadic {

using nlohmann::json;

namespace {

std::vector<double> parse_block(const json& node, BlockKind kind, std::size_t line_no) {
  const std::string name(block_name(kind));
  if (!node.is_array()) throw SchemaError(line_no, "'" + name + "' must be an array");
  const std::size_t want = expected_dim(kind);
  if (node.size() != want) {
    throw SchemaError(line_no, "'" + name + "' has " + std::to_string(node.size()) +
                                   " entries, expected length " + std::to_string(want));
  }
  std::vector<double> values;
  values.reserve(want);
  for (std::size_t i = 0; i < node.size(); ++i) {
    const json& v = node[i];
    if (!v.is_number()) {
      throw SchemaError(line_no, "'" + name + "'[" + std::to_string(i) + "] is not a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      throw SchemaError(line_no, "'" + name + "'[" + std::to_string(i) + "] is not finite");
    }
    values.push_back(x);
  }
  return values;
}

int parse_item(const json& node, const char* key, std::size_t line_no) {
  if (!node.is_number_integer()) {
    throw SchemaError(line_no, std::string("mdmq.") + key + " must be an integer");
  }
  const auto v = node.get<long long>();
  if (v < kMdmqMin || v > kMdmqMax) {
    throw SchemaError(line_no, std::string("mdmq.") + key + " = " + std::to_string(v) +
                                   " is outside 1..6");
  }
  return static_cast<int>(v);
}

MdmqItems parse_mdmq(const json& node, std::size_t line_no) {
  if (!node.is_object()) throw SchemaError(line_no, "'mdmq' must be an object");
  MdmqItems items;
  bool has_good_bad = false;
  bool has_happy_sad = false;
  for (const auto& [key, value] : node.items()) {
    if (key == "good_bad") {
      items.good_bad = parse_item(value, "good_bad", line_no);
      has_good_bad = true;
    } else if (key == "happy_sad") {
      items.happy_sad = parse_item(value, "happy_sad", line_no);
      has_happy_sad = true;
    } else if (key == "relaxed_angry") {
      items.relaxed_angry = parse_item(value, "relaxed_angry", line_no);
    } else if (key == "calm_stressed") {
      items.calm_stressed = parse_item(value, "calm_stressed", line_no);
    } else {
      throw SchemaError(line_no, "unknown key 'mdmq." + key + "'");
    }
  }
  if (!has_good_bad) throw SchemaError(line_no, "missing required key 'mdmq.good_bad'");
  if (!has_happy_sad) throw SchemaError(line_no, "missing required key 'mdmq.happy_sad'");
  return items;
}

void append_number(std::string& out, double x) {
  if (x == 0.0 && std::signbit(x)) {
    out += "-0.0";  // "-0" would read back as the integer 0
    return;
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, res.ptr);
}

void append_block(std::string& out, const FeatureVector& block) {
  out.push_back('[');
  bool first = true;
  for (double x : block.values()) {
    if (!first) out.push_back(',');
    first = false;
    append_number(out, x);
  }
  out.push_back(']');
}

}  // namespace

double RoleStats::negative_ratio() const noexcept {
  return samples == 0 ? 0.0 : static_cast<double>(negatives) / static_cast<double>(samples);
}

PartnerRecord parse_record(std::string_view line, std::size_t line_no) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw SchemaError(line_no, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError(line_no, "record must be a JSON object");

  const json* couple = nullptr;
  const json* role = nullptr;
  const json* ling = nullptr;
  const json* para = nullptr;
  const json* mdmq = nullptr;
  const json* label = nullptr;
  for (const auto& [key, value] : doc.items()) {
    if (key == "couple_id") couple = &value;
    else if (key == "role") role = &value;
    else if (key == "linguistic") ling = &value;
    else if (key == "paralinguistic") para = &value;
    else if (key == "mdmq") mdmq = &value;
    else if (key == "label") label = &value;
    else throw SchemaError(line_no, "unknown key '" + key + "'");
  }
  for (auto [ptr, name] : {std::pair{couple, "couple_id"}, std::pair{role, "role"},
                           std::pair{ling, "linguistic"}, std::pair{para, "paralinguistic"},
                           std::pair{mdmq, "mdmq"}}) {
    if (ptr == nullptr) throw SchemaError(line_no, std::string("missing required key '") + name + "'");
  }

  PartnerRecord rec;
  if (!couple->is_string() || couple->get_ref<const std::string&>().empty()) {
    throw SchemaError(line_no, "'couple_id' must be a non-empty string");
  }
  rec.couple_id = couple->get<std::string>();

  const auto parsed_role = role->is_string() ? parse_role(role->get_ref<const std::string&>())
                                             : std::nullopt;
  if (!parsed_role) throw SchemaError(line_no, "'role' must be \"m\" or \"f\"");
  rec.role = *parsed_role;

  rec.linguistic = FeatureVector(BlockKind::Linguistic, parse_block(*ling, BlockKind::Linguistic, line_no));
  rec.paralinguistic =
      FeatureVector(BlockKind::Paralinguistic, parse_block(*para, BlockKind::Paralinguistic, line_no));
  rec.mdmq = parse_mdmq(*mdmq, line_no);

  const int derived = compute_valence_label(rec.mdmq).value;
  if (label != nullptr) {
    if (!label->is_number_integer() || (label->get<long long>() != 0 && label->get<long long>() != 1)) {
      throw SchemaError(line_no, "'label' must be 0 or 1");
    }
    if (label->get<int>() != derived) {
      throw SchemaError(line_no, "'label' = " + std::to_string(label->get<int>()) +
                                     " disagrees with MDMQ-derived label " + std::to_string(derived));
    }
  }
  rec.label = derived;
  return rec;
}

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  corpus.provenance = Provenance::Ingested;
  std::map<std::string, std::size_t> index;            // couple_id -> dyad slot
  std::map<std::pair<std::string, Role>, std::size_t> first_line;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    PartnerRecord rec = parse_record(line, line_no);

    const auto key = std::pair{rec.couple_id, rec.role};
    if (const auto it = first_line.find(key); it != first_line.end()) {
      throw SchemaError(line_no, "duplicate identity couple_id '" + rec.couple_id + "' role '" +
                                     std::string(role_token(rec.role)) + "' (first seen on line " +
                                     std::to_string(it->second) + ")");
    }
    first_line.emplace(key, line_no);

    auto [it, inserted] = index.try_emplace(rec.couple_id, corpus.dyads.size());
    if (inserted) corpus.dyads.push_back(DyadRecord{rec.couple_id, std::nullopt, std::nullopt});
    DyadRecord& dyad = corpus.dyads[it->second];
    const Role role = rec.role;
    dyad.partner(role) = std::move(rec);
  }
  if (in.bad()) throw Error(ErrorCode::Io, "read failure");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open feature file '" + path.string() + "'");
  return read_corpus(in);
}

std::string serialize_record(const PartnerRecord& record) {
  std::string out;
  out.reserve(20 * (kMultimodalDim + 8));
  out += R"({"couple_id":)";
  out += json(record.couple_id).dump();
  out += R"(,"role":")";
  out += role_token(record.role);
  out += R"(","linguistic":)";
  append_block(out, record.linguistic);
  out += R"(,"paralinguistic":)";
  append_block(out, record.paralinguistic);
  out += R"(,"mdmq":{"good_bad":)";
  out += std::to_string(record.mdmq.good_bad);
  out += R"(,"happy_sad":)";
  out += std::to_string(record.mdmq.happy_sad);
  if (record.mdmq.relaxed_angry) {
    out += R"(,"relaxed_angry":)";
    out += std::to_string(*record.mdmq.relaxed_angry);
  }
  if (record.mdmq.calm_stressed) {
    out += R"(,"calm_stressed":)";
    out += std::to_string(*record.mdmq.calm_stressed);
  }
  out += '}';
  if (record.label) {
    out += R"(,"label":)";
    out += std::to_string(*record.label);
  }
  out += '}';
  return out;
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const DyadRecord& dyad : corpus.dyads) {
    for (Role role : kRoles) {
      if (const auto& p = dyad.partner(role)) out << serialize_record(*p) << '\n';
    }
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write feature file '" + path.string() + "'");
  write_corpus(corpus, out);
  if (!out) throw Error(ErrorCode::Io, "write failure on '" + path.string() + "'");
}

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.dyads.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus has no dyads");
  CorpusStats stats;
  stats.couples = corpus.dyads.size();
  for (const DyadRecord& dyad : corpus.dyads) {
    for (Role role : kRoles) {
      const auto& p = dyad.partner(role);
      if (!p) continue;
      RoleStats& rs = role == Role::Male ? stats.male : stats.female;
      ++rs.samples;
      const int label = p->label ? *p->label : compute_valence_label(p->mdmq).value;
      if (label == 0) ++rs.negatives;
    }
  }
  return stats;
}

}  // namespace dyadic
