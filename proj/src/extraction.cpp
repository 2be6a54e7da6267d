#include "escan/extraction.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "escan/errors.hpp"
#include "escan/tsv.hpp"

namespace escan {

namespace {

bool has_digit(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) {
        return c >= '0' && c <= '9';
    });
}

std::map<std::string, std::string> parse_attributes(
    const std::vector<std::string>& cols, std::size_t first, ConceptType type,
    const std::string& context) {
    std::map<std::string, std::string> attrs;
    for (std::size_t i = first; i < cols.size(); ++i) {
        if (cols[i].empty()) continue;
        auto eq = cols[i].find('=');
        if (eq == std::string::npos || eq == 0) {
            throw IoError("bad attribute column '" + cols[i] + "' in " + context);
        }
        std::string key = cols[i].substr(0, eq);
        if (!attribute_allowed(type, key)) {
            throw IoError("attribute '" + key + "' not allowed for " +
                          std::string(to_string(type)) + " in " + context);
        }
        attrs[key] = cols[i].substr(eq + 1);
    }
    return attrs;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lexicon

Lexicon Lexicon::load(const std::filesystem::path& path,
                      const Lemmatizer& lemmatizer) {
    Lexicon lex;
    for (const auto& line : tsv::read_lines(path.string())) {
        auto cols = tsv::split(line);
        if (cols.size() < 3) throw IoError("bad lexicon row: " + line);
        auto type = concept_type_from(cols[1]);
        if (!type) throw IoError("unknown concept type in lexicon row: " + line);
        lex.add(cols[0], *type, cols[2], lemmatizer,
                parse_attributes(cols, 3, *type, "lexicon row '" + line + "'"));
    }
    return lex;
}

void Lexicon::add(const std::string& phrase, ConceptType type,
                  const std::string& alias, const Lemmatizer& lemmatizer,
                  std::map<std::string, std::string> attributes) {
    LexiconEntry entry;
    entry.phrase = phrase;
    entry.type = type;
    entry.alias = alias.empty() ? tsv::to_lower(phrase) : alias;
    entry.attributes = std::move(attributes);
    for (const Token& tok : tokenize(phrase)) {
        entry.lemmas.push_back(lemmatizer.lemma(tok.surface));
    }
    if (entry.lemmas.empty()) throw IoError("lexicon phrase has no tokens: " + phrase);
    entries_.push_back(std::move(entry));
    // Rebuild the first-lemma index: entry pointers may have moved.
    by_first_.clear();
    for (const LexiconEntry& e : entries_) {
        by_first_[e.lemmas.front()].push_back(&e);
    }
    for (auto& [lemma, cands] : by_first_) {
        std::stable_sort(cands.begin(), cands.end(),
                         [](const LexiconEntry* a, const LexiconEntry* b) {
                             if (a->lemmas.size() != b->lemmas.size()) {
                                 return a->lemmas.size() > b->lemmas.size();
                             }
                             return a->phrase < b->phrase;
                         });
    }
}

const std::vector<const LexiconEntry*>* Lexicon::candidates(
    std::string_view lemma) const {
    auto it = by_first_.find(std::string(lemma));
    return it == by_first_.end() ? nullptr : &it->second;
}

std::vector<ConceptMention> tag_concepts(const std::vector<Token>& tokens,
                                         const Lexicon& lexicon) {
    std::vector<ConceptMention> mentions;
    std::size_t pos = 0;
    while (pos < tokens.size()) {
        const LexiconEntry* best = nullptr;
        if (const auto* cands = lexicon.candidates(tokens[pos].lemma)) {
            for (const LexiconEntry* entry : *cands) {
                std::size_t len = entry->lemmas.size();
                if (pos + len > tokens.size()) continue;
                bool ok = true;
                for (std::size_t k = 0; k < len && ok; ++k) {
                    ok = tokens[pos + k].lemma == entry->lemmas[k] &&
                         tokens[pos + k].sentence == tokens[pos].sentence;
                }
                if (ok) {
                    best = entry;  // candidates are longest-first
                    break;
                }
            }
        }
        if (!best) {
            ++pos;
            continue;
        }
        ConceptMention m;
        std::size_t len = best->lemmas.size();
        for (std::size_t k = 0; k < len; ++k) {
            if (k) m.surface += ' ';
            m.surface += tokens[pos + k].surface;
        }
        m.alias = best->alias;
        m.type = best->type;
        m.token_begin = pos;
        m.token_end = pos + len;
        m.char_begin = tokens[pos].begin;
        m.char_end = tokens[pos + len - 1].end;
        m.sentence = tokens[pos].sentence;
        m.attributes = best->attributes;
        mentions.push_back(std::move(m));
        pos += len;
    }
    return mentions;
}

// ---------------------------------------------------------------------------
// Expansion

ExpansionTable ExpansionTable::load(const std::filesystem::path& path) {
    ExpansionTable table;
    for (const auto& line : tsv::read_lines(path.string())) {
        auto cols = tsv::split(line);
        if (cols.size() != 3) throw IoError("bad expansion row: " + line);
        table.add(cols[0], cols[1], tsv::parse_double(cols[2]));
    }
    return table;
}

void ExpansionTable::add(const std::string& alias, const std::string& related,
                         double weight) {
    if (!(weight > 0.0 && weight <= 1.0)) {
        throw IoError("expansion weight for '" + alias + "' -> '" + related +
                      "' must be in (0,1]");
    }
    table_[alias].emplace_back(related, weight);
}

const std::vector<std::pair<std::string, double>>* ExpansionTable::related(
    std::string_view alias) const {
    auto it = table_.find(alias);
    return it == table_.end() ? nullptr : &it->second;
}

std::size_t ExpansionTable::size() const { return table_.size(); }

std::map<std::string, double> expand_concepts(
    const std::vector<ConceptMention>& mentions, const ExpansionTable& table) {
    std::set<std::string> present;
    for (const auto& m : mentions) present.insert(m.alias);
    std::map<std::string, double> out;
    for (const auto& m : mentions) {
        const auto* rel = table.related(m.alias);
        if (!rel) continue;
        for (const auto& [related, weight] : *rel) {
            if (present.count(related)) continue;
            out[related] += weight;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Relation rules

RuleSet RuleSet::load(const std::filesystem::path& path,
                      const Lemmatizer& lemmatizer) {
    RuleSet rules;
    for (const auto& line : tsv::read_lines(path.string())) {
        auto cols = tsv::split(line);
        if (cols.size() < 2 || cols.size() > 3) {
            throw IoError("bad rule row: " + line);
        }
        double confidence = cols.size() == 3 ? tsv::parse_double(cols[2]) : 1.0;
        rules.add(cols[0], cols[1], confidence, lemmatizer);
    }
    return rules;
}

void RuleSet::add(const std::string& pattern, const std::string& code,
                  double confidence, const Lemmatizer& lemmatizer) {
    RelationRule rule;
    rule.pattern = pattern;
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
        throw IoError("rule confidence out of [0,1]: " + pattern);
    }
    rule.confidence = confidence;

    std::string code_text = code;
    if (!code_text.empty() && code_text.back() == '~') {
        rule.swap_args = true;
        code_text.pop_back();
    }
    auto rel = base_relation_from(code_text);
    if (!rel) throw IoError("unknown relation code '" + code + "' in rule: " + pattern);
    rule.code = *rel;

    std::istringstream in(pattern);
    std::string word;
    std::size_t slots = 0;
    while (in >> word) {
        RuleElement el;
        if (word.size() >= 2 && word.front() == '{' && word.back() == '}') {
            std::string inner = word.substr(1, word.size() - 2);
            if (inner == "#") {
                el.kind = RuleElement::Kind::NumberSlot;
            } else {
                el.kind = RuleElement::Kind::Slot;
                if (inner != "*") {
                    auto eq = inner.find('=');
                    std::string type_part =
                        eq == std::string::npos ? inner : inner.substr(0, eq);
                    if (!type_part.empty()) {
                        auto type = concept_type_from(type_part);
                        if (!type) {
                            throw IoError("unknown concept type '" + type_part +
                                          "' in rule: " + pattern);
                        }
                        el.slot_type = *type;
                    }
                    if (eq != std::string::npos) {
                        el.slot_alias = inner.substr(eq + 1);
                    }
                }
            }
            ++slots;
        } else if (word == "*") {
            el.kind = RuleElement::Kind::AnyToken;
        } else {
            el.kind = RuleElement::Kind::Lemma;
            std::size_t start = 0;
            while (start <= word.size()) {
                auto bar = word.find('|', start);
                std::string alt = word.substr(
                    start, bar == std::string::npos ? std::string::npos
                                                    : bar - start);
                if (!alt.empty()) el.lemmas.push_back(lemmatizer.lemma(alt));
                if (bar == std::string::npos) break;
                start = bar + 1;
            }
            if (el.lemmas.empty()) {
                throw IoError("empty lemma element in rule: " + pattern);
            }
        }
        rule.elements.push_back(std::move(el));
    }
    if (slots != 2) {
        throw IoError("rule needs exactly two slots: " + pattern);
    }
    rules_.push_back(std::move(rule));
}

namespace {

// Match one rule starting at token `start`; fills args and returns success.
bool match_rule_at(const RelationRule& rule, const std::vector<Token>& tokens,
                   const std::vector<const ConceptMention*>& mention_at,
                   std::size_t start, std::vector<ConceptMention>& args) {
    std::size_t cursor = start;
    std::size_t sentence = tokens[start].sentence;
    args.clear();
    for (const RuleElement& el : rule.elements) {
        if (cursor >= tokens.size() || tokens[cursor].sentence != sentence) {
            return false;
        }
        switch (el.kind) {
            case RuleElement::Kind::Slot: {
                const ConceptMention* m = mention_at[cursor];
                if (!m) return false;
                if (el.slot_type && m->type != *el.slot_type) return false;
                if (el.slot_alias && m->alias != *el.slot_alias) return false;
                args.push_back(*m);
                cursor = m->token_end;
                break;
            }
            case RuleElement::Kind::NumberSlot: {
                const Token& tok = tokens[cursor];
                if (!has_digit(tok.surface)) return false;
                ConceptMention m;
                m.surface = tok.surface;
                m.alias = tsv::to_lower(tok.surface);
                m.type = ConceptType::HealthStatus;
                m.token_begin = cursor;
                m.token_end = cursor + 1;
                m.char_begin = tok.begin;
                m.char_end = tok.end;
                m.sentence = tok.sentence;
                args.push_back(std::move(m));
                ++cursor;
                break;
            }
            case RuleElement::Kind::Lemma: {
                const std::string& lemma = tokens[cursor].lemma;
                if (std::find(el.lemmas.begin(), el.lemmas.end(), lemma) ==
                    el.lemmas.end()) {
                    return false;
                }
                ++cursor;
                break;
            }
            case RuleElement::Kind::AnyToken:
                ++cursor;
                break;
        }
    }
    return args.size() == 2;
}

}  // namespace

std::vector<BaseRelationMention> extract_base_relations(
    const std::vector<Token>& tokens, const std::vector<ConceptMention>& mentions,
    const RuleSet& rules) {
    std::vector<const ConceptMention*> mention_at(tokens.size(), nullptr);
    for (const ConceptMention& m : mentions) {
        if (m.token_begin < mention_at.size()) mention_at[m.token_begin] = &m;
    }
    std::vector<BaseRelationMention> out;
    std::set<std::tuple<std::size_t, std::size_t, BaseRelation, std::size_t,
                        std::size_t>>
        seen;
    std::vector<ConceptMention> args;
    for (const RelationRule& rule : rules.rules()) {
        for (std::size_t start = 0; start < tokens.size(); ++start) {
            if (!match_rule_at(rule, tokens, mention_at, start, args)) continue;
            BaseRelationMention rel;
            rel.arg1 = args[0];
            rel.arg2 = args[1];
            if (rule.swap_args) std::swap(rel.arg1, rel.arg2);
            rel.code = rule.code;
            rel.confidence = rule.confidence;
            auto key = std::make_tuple(rel.arg1.char_begin, rel.arg1.char_end,
                                       rel.code, rel.arg2.char_begin,
                                       rel.arg2.char_end);
            if (!seen.insert(key).second) continue;
            out.push_back(std::move(rel));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Semantic calculus

namespace {

const std::map<std::string, std::set<std::string>>& bridge_classes() {
    static const std::map<std::string, std::set<std::string>> classes = {
        {"experiencing-verb",
         {"suffer", "experience", "undergo", "diagnose", "hospitalize"}},
        {"treatment-verb",
         {"prescribe", "receive", "administer", "give", "treat", "perform",
          "screen"}},
        {"therapy-noun",
         {"therapy", "treatment", "intervention", "procedure", "care"}},
    };
    return classes;
}

}  // namespace

bool bridge_class_contains(const std::string& bridge_class,
                           const std::string& alias) {
    if (bridge_class.empty()) return true;
    auto it = bridge_classes().find(bridge_class);
    if (it == bridge_classes().end()) {
        throw IoError("unknown bridge class: " + bridge_class);
    }
    return it->second.count(alias) > 0;
}

AxiomSet AxiomSet::load(const std::filesystem::path& path) {
    AxiomSet set;
    for (const auto& line : tsv::read_lines(path.string())) {
        auto cols = tsv::split(line);
        if (cols.size() != 6) throw IoError("bad axiom row: " + line);
        SemanticAxiom ax;
        auto r1 = base_relation_from(cols[0]);
        auto r2 = base_relation_from(cols[1]);
        auto r0 = cqm_relation_from(cols[2]);
        auto c1 = concept_type_from(cols[3]);
        auto c2 = concept_type_from(cols[4]);
        if (!r1 || !r2 || !r0 || !c1 || !c2) {
            throw IoError("bad axiom row: " + line);
        }
        ax.r1 = *r1;
        ax.r2 = *r2;
        ax.r0 = *r0;
        ax.c1_type = *c1;
        ax.c2_type = *c2;
        if (cols[5] != "-") ax.bridge_class = cols[5];
        set.add(std::move(ax));
    }
    return set;
}

void AxiomSet::add(SemanticAxiom axiom) {
    if (!validate_triple_typing(axiom.c1_type, axiom.r0, axiom.c2_type)) {
        throw TypingError("axiom violates the domain/range table: " +
                          std::string(to_string(axiom.c1_type)) + " " +
                          std::string(to_string(axiom.r0)) + " " +
                          std::string(to_string(axiom.c2_type)));
    }
    if (!axiom.bridge_class.empty() &&
        bridge_classes().find(axiom.bridge_class) == bridge_classes().end()) {
        throw IoError("unknown bridge class: " + axiom.bridge_class);
    }
    axioms_.push_back(std::move(axiom));
}

std::vector<DerivedTriple> apply_semantic_calculus(
    const std::vector<BaseRelationMention>& base_relations,
    const AxiomSet& axioms) {
    auto same_span = [](const ConceptMention& a, const ConceptMention& b) {
        return a.char_begin == b.char_begin && a.char_end == b.char_end;
    };
    // Keyed (subject alias, relation, object alias); highest confidence wins.
    std::map<std::tuple<std::string, CqmRelation, std::string>, DerivedTriple>
        derived;
    for (const BaseRelationMention& first : base_relations) {
        for (const BaseRelationMention& second : base_relations) {
            if (&first == &second) continue;
            if (!same_span(first.arg2, second.arg1)) continue;
            for (const SemanticAxiom& ax : axioms.axioms()) {
                if (ax.r1 != first.code || ax.r2 != second.code) continue;
                if (first.arg1.type != ax.c1_type) continue;
                if (second.arg2.type != ax.c2_type) continue;
                if (!bridge_class_contains(ax.bridge_class, first.arg2.alias)) {
                    continue;
                }
                if (!validate_triple_typing(first.arg1.type, ax.r0,
                                            second.arg2.type)) {
                    throw TypingError(
                        "derived relation violates the domain/range table: " +
                        first.arg1.alias + " " + std::string(to_string(ax.r0)) +
                        " " + second.arg2.alias);
                }
                DerivedTriple t;
                t.subject = first.arg1;
                t.relation = ax.r0;
                t.object = second.arg2;
                t.confidence = std::min(first.confidence, second.confidence);
                auto key = std::make_tuple(t.subject.alias, t.relation,
                                           t.object.alias);
                auto it = derived.find(key);
                if (it == derived.end()) {
                    derived.emplace(std::move(key), std::move(t));
                } else if (t.confidence > it->second.confidence) {
                    it->second = std::move(t);
                }
            }
        }
    }
    std::vector<DerivedTriple> out;
    out.reserve(derived.size());
    for (auto& [key, triple] : derived) out.push_back(std::move(triple));
    return out;
}

// ---------------------------------------------------------------------------
// Bundle and document assembly

ResourceBundle ResourceBundle::load(const std::filesystem::path& dir) {
    ResourceBundle bundle;
    bundle.stopwords = StopwordSet::load(dir / "stopwords.txt");
    bundle.lexicon = Lexicon::load(dir / "lexicon.tsv", bundle.lemmatizer);
    bundle.expansions = ExpansionTable::load(dir / "expansions.tsv");
    bundle.rules = RuleSet::load(dir / "rules.tsv", bundle.lemmatizer);
    bundle.axioms = AxiomSet::load(dir / "axioms.tsv");
    return bundle;
}

ExtractionResult extract(std::string_view text, const ResourceBundle& bundle) {
    ExtractionResult result;
    result.tokens =
        tokenize_lemmatize(text, bundle.lemmatizer, bundle.stopwords);
    result.mentions = tag_concepts(result.tokens, bundle.lexicon);
    result.expansions = expand_concepts(result.mentions, bundle.expansions);
    result.base_relations =
        extract_base_relations(result.tokens, result.mentions, bundle.rules);
    result.triples =
        apply_semantic_calculus(result.base_relations, bundle.axioms);
    return result;
}

FieldedDocument fields_from_extraction(const std::string& doc_id,
                                       const ExtractionResult& ex) {
    FieldedDocument doc;
    doc.doc_id = doc_id;
    for (const Token& tok : ex.tokens) {
        if (!tok.is_stopword) doc.add(Field::Keywords, tok.lemma);
    }
    for (const ConceptMention& m : ex.mentions) {
        doc.add(Field::Concepts, m.alias);
    }
    for (const auto& [alias, weight] : ex.expansions) {
        doc.add(Field::Expansions, alias, weight);
    }
    for (const BaseRelationMention& rel : ex.base_relations) {
        doc.add(Field::Relations, rel.arg1.alias + "|" +
                                      std::string(to_string(rel.code)) + "|" +
                                      rel.arg2.alias);
    }
    for (const DerivedTriple& t : ex.triples) {
        doc.add(Field::CqmRelations, t.subject.alias + "|" +
                                         std::string(to_string(t.relation)) +
                                         "|" + t.object.alias);
    }
    return doc;
}

FieldedDocument build_fielded_document(const std::string& doc_id,
                                       std::string_view text,
                                       const ResourceBundle& bundle) {
    return fields_from_extraction(doc_id, extract(text, bundle));
}

}  // namespace escan
