#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tangsong/error.hpp"
#include "tangsong/utf8.hpp"

namespace tangsong {

enum class Collection { Ctp, Csl, Csp, Other };

inline std::string_view to_string(Collection c) {
    switch (c) {
        case Collection::Ctp: return "CTP";
        case Collection::Csl: return "CSL";
        case Collection::Csp: return "CSP";
        case Collection::Other: return "OTHER";
    }
    return "OTHER";
}

inline std::optional<Collection> collection_from(std::string_view s) {
    if (s == "CTP") return Collection::Ctp;
    if (s == "CSL") return Collection::Csl;
    if (s == "CSP") return Collection::Csp;
    if (s == "OTHER") return Collection::Other;
    return std::nullopt;
}

/// Optional character-variant unification applied during normalization.
/// Keys are unique; a mapped-to character that is itself a key must map to
/// itself, so normalization stays idempotent.
using VariantMap = std::unordered_map<char32_t, char32_t>;

struct NormalizedText {
    std::u32string chars;                 // CJK ideographs only, textual order
    std::vector<std::size_t> offsets;     // byte offset of each kept char in the raw text
    std::vector<std::uint32_t> segments;  // raw-contiguity segment id per kept char
};

/// Keeps CJK ideographs, drops everything else (punctuation, whitespace,
/// Latin, digits), and remembers where each kept character came from.
/// Characters that were not adjacent in the raw text (something was dropped
/// between them) land in different segments; downstream fragment extraction
/// never joins characters across a segment break.
inline NormalizedText normalize_text(std::string_view body_raw, const VariantMap* variants = nullptr) {
    NormalizedText out;
    std::size_t pos = 0;
    std::uint32_t segment = 0;
    bool prev_kept = false;
    while (pos < body_raw.size()) {
        std::size_t len = 0;
        char32_t cp = utf8::decode_at(body_raw, pos, len);
        if (utf8::is_cjk_ideograph(cp)) {
            if (!prev_kept && !out.chars.empty()) ++segment;
            if (variants) {
                auto it = variants->find(cp);
                if (it != variants->end()) cp = it->second;
            }
            out.chars.push_back(cp);
            out.offsets.push_back(pos);
            out.segments.push_back(segment);
            prev_kept = true;
        } else {
            prev_kept = false;
        }
        pos += len;
    }
    return out;
}

/// Variant table file: one `from<TAB>to` pair per line, both single CJK
/// ideographs; `#` lines ignored.
inline VariantMap load_variant_map(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open variant map: " + path.string());
    VariantMap map;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& what) {
        throw Error(path.string() + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) fail("expected `from<TAB>to`");
        std::u32string from = utf8::decode(line.substr(0, tab));
        std::u32string to = utf8::decode(line.substr(tab + 1));
        if (from.size() != 1 || to.size() != 1) fail("both sides must be a single character");
        if (!utf8::is_cjk_ideograph(from[0]) || !utf8::is_cjk_ideograph(to[0]))
            fail("both sides must be CJK ideographs");
        if (map.count(from[0])) fail("duplicate mapping for " + utf8::encode(from[0]));
        map[from[0]] = to[0];
    }
    // Reject chains (a->b with b->c): they would make normalization
    // non-idempotent.
    for (const auto& [from, to] : map) {
        auto it = map.find(to);
        if (it != map.end() && it->second != to)
            throw Error(path.string() + ": chained mapping through " + utf8::encode(to));
    }
    return map;
}

struct Poem {
    std::string id;                       // globally unique, no "|||", no newline/tab
    std::string author_name;
    std::optional<std::string> author_id; // filled by attach_poets when resolvable
    std::string title;
    std::string body_raw;
    std::u32string body_norm;
    std::vector<std::size_t> offsets;     // body_norm position -> byte offset in body_raw
    std::vector<std::uint32_t> segments;  // raw-contiguity segment per body_norm position
    Collection collection = Collection::Other;
};

struct Poet {
    std::string id;
    std::string name;                     // full name
    std::vector<std::string> alt_names;
    std::optional<int> birth_year;        // CE; absent when unknown
    std::optional<int> death_year;
};

struct Corpus {
    std::vector<Poem> poems;
    std::vector<Poet> poets;
    std::unordered_map<std::string, std::size_t> by_id; // poem id -> index in poems

    const Poem* find(std::string_view id) const {
        auto it = by_id.find(std::string(id));
        return it == by_id.end() ? nullptr : &poems[it->second];
    }
    const Poem& at(std::string_view id) const {
        const Poem* p = find(id);
        if (!p) throw Error("unknown poem id: " + std::string(id));
        return *p;
    }
};

namespace detail {

inline void validate_field(std::string_view value, const char* what, const std::string& where) {
    if (value.find("|||") != std::string_view::npos)
        throw Error(where + ": " + what + " contains forbidden substring \"|||\"");
    if (value.find('\n') != std::string_view::npos || value.find('\t') != std::string_view::npos)
        throw Error(where + ": " + what + " contains a control character");
}

} // namespace detail

/// Builds a Poem from raw fields; normalizes the body and checks the id and
/// author against the record-format rules (`|||` is the field separator of
/// comparison records and `_` joins author and id in record headers).
inline Poem make_poem(std::string id, std::string author, std::string title,
                      std::string body_raw, Collection collection,
                      const VariantMap* variants = nullptr,
                      const std::string& where = "poem") {
    detail::validate_field(id, "id", where);
    detail::validate_field(author, "author", where);
    if (id.empty()) throw Error(where + ": empty id");
    if (author.find('_') != std::string::npos)
        throw Error(where + ": author \"" + author + "\" contains '_' (reserved in record headers)");
    Poem poem;
    poem.id = std::move(id);
    poem.author_name = std::move(author);
    poem.title = std::move(title);
    poem.body_raw = std::move(body_raw);
    NormalizedText norm = normalize_text(poem.body_raw, variants);
    poem.body_norm = std::move(norm.chars);
    poem.offsets = std::move(norm.offsets);
    poem.segments = std::move(norm.segments);
    poem.collection = collection;
    return poem;
}

inline void add_poem(Corpus& corpus, Poem poem) {
    auto [it, inserted] = corpus.by_id.emplace(poem.id, corpus.poems.size());
    if (!inserted)
        throw Error("duplicate poem id \"" + poem.id + "\" (poems #" +
                    std::to_string(it->second + 1) + " and #" +
                    std::to_string(corpus.poems.size() + 1) + ")");
    corpus.poems.push_back(std::move(poem));
}

/// Poem file: UTF-8, one record per line, `id<TAB>author<TAB>title<TAB>body`.
/// Lines starting with `#` and blank lines are ignored. A three-field line
/// has no id; `<collection>-<line-number>` is synthesized for it.
inline void load_poem_file(Corpus& corpus, const std::filesystem::path& path,
                           Collection tag, const VariantMap* variants = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open poem file: " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);

        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            auto tab = line.find('\t', start);
            if (tab == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }

        std::string id, author, title, body;
        if (fields.size() == 4) {
            id = fields[0];
            author = fields[1];
            title = fields[2];
            body = fields[3];
        } else if (fields.size() == 3) {
            id = std::string(to_string(tag)) + "-" + std::to_string(lineno);
            author = fields[0];
            title = fields[1];
            body = fields[2];
        } else {
            throw Error(where + ": expected 3 or 4 tab-separated fields, got " +
                        std::to_string(fields.size()));
        }
        try {
            add_poem(corpus, make_poem(std::move(id), std::move(author), std::move(title),
                                       std::move(body), tag, variants, where));
        } catch (const Error& e) {
            throw Error(std::string(e.what()) + " (while loading " + where + ")");
        }
    }
}

inline Corpus load_corpus(const std::vector<std::filesystem::path>& paths,
                          const std::vector<Collection>& tags,
                          const VariantMap* variants = nullptr) {
    if (paths.size() != tags.size())
        throw Error("load_corpus: one collection tag required per file");
    Corpus corpus;
    for (std::size_t i = 0; i < paths.size(); ++i)
        load_poem_file(corpus, paths[i], tags[i], variants);
    return corpus;
}

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return std::string(s.substr(b, e - b));
}

// Minimal CSV field splitter with double-quote support.
inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { cur.push_back('"'); ++i; }
                else quoted = false;
            } else cur.push_back(c);
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace detail

/// Poet file: UTF-8 CSV with header `id,name,alt_names,birth_year,death_year`;
/// alt_names is `;`-separated inside the field; empty year fields mean the
/// year is unknown.
inline std::vector<Poet> load_poets(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open poet file: " + path.string());
    std::vector<Poet> poets;
    std::unordered_map<std::string, std::size_t> seen;
    std::string line;
    std::size_t lineno = 0;
    bool header_done = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        auto fields = detail::split_csv(line);
        if (fields.size() != 5)
            throw Error(where + ": expected 5 fields, got " + std::to_string(fields.size()));
        for (auto& f : fields) f = detail::trim(f);
        if (!header_done) {
            header_done = true;
            if (fields[0] == "id" && fields[1] == "name") continue; // header row
        }

        Poet poet;
        poet.id = fields[0];
        poet.name = fields[1];
        if (poet.id.empty()) throw Error(where + ": empty poet id");
        if (poet.name.empty()) throw Error(where + ": empty poet name");
        for (std::size_t b = 0, e = 0; b <= fields[2].size(); b = e + 1) {
            e = fields[2].find(';', b);
            if (e == std::string::npos) e = fields[2].size();
            std::string alt = detail::trim(std::string_view(fields[2]).substr(b, e - b));
            if (alt.empty() || alt == poet.name) continue;
            if (std::find(poet.alt_names.begin(), poet.alt_names.end(), alt) == poet.alt_names.end())
                poet.alt_names.push_back(alt);
        }
        auto parse_year = [&](const std::string& s) -> std::optional<int> {
            if (s.empty()) return std::nullopt;
            try {
                std::size_t used = 0;
                int y = std::stoi(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                return y;
            } catch (const std::exception&) {
                throw Error(where + ": bad year \"" + s + "\"");
            }
        };
        poet.birth_year = parse_year(fields[3]);
        poet.death_year = parse_year(fields[4]);
        if (poet.birth_year && poet.death_year && *poet.birth_year > *poet.death_year)
            throw Error(where + ": birth year " + std::to_string(*poet.birth_year) +
                        " after death year " + std::to_string(*poet.death_year));
        auto [it, inserted] = seen.emplace(poet.id, lineno);
        if (!inserted)
            throw Error(where + ": duplicate poet id \"" + poet.id + "\" (first at line " +
                        std::to_string(it->second) + ")");
        poets.push_back(std::move(poet));
    }
    return poets;
}

/// Lookup over a poet list: by id, and by full name when the name is unique.
class PoetIndex {
public:
    explicit PoetIndex(const std::vector<Poet>& poets) : poets_(&poets) {
        for (std::size_t i = 0; i < poets.size(); ++i) {
            by_id_.emplace(poets[i].id, i);
            auto [it, inserted] = by_name_.emplace(poets[i].name, i);
            if (!inserted) it->second = kAmbiguous;
        }
    }

    const Poet* by_id(std::string_view id) const {
        auto it = by_id_.find(std::string(id));
        return it == by_id_.end() ? nullptr : &(*poets_)[it->second];
    }

    /// Resolves a poem's author: explicit author_id first, unique full-name
    /// match otherwise. Returns nullptr when unknown or ambiguous.
    const Poet* resolve_author(const Poem& poem) const {
        if (poem.author_id) {
            if (const Poet* p = by_id(*poem.author_id)) return p;
        }
        auto it = by_name_.find(poem.author_name);
        if (it == by_name_.end() || it->second == kAmbiguous) return nullptr;
        return &(*poets_)[it->second];
    }

private:
    static constexpr std::size_t kAmbiguous = static_cast<std::size_t>(-1);
    const std::vector<Poet>* poets_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::size_t> by_name_;
};

/// Stores the poet list in the corpus and fills poem.author_id where the
/// author name resolves to exactly one poet.
inline void attach_poets(Corpus& corpus, std::vector<Poet> poets) {
    corpus.poets = std::move(poets);
    PoetIndex index(corpus.poets);
    for (Poem& poem : corpus.poems) {
        if (const Poet* p = index.resolve_author(poem)) poem.author_id = p->id;
    }
}

} // namespace tangsong
