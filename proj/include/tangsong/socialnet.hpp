#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tangsong/corpus.hpp"

namespace tangsong {

enum class MentionKind { Full, Alt };
enum class MentionLocation { Title, Body };

/// One occurrence of a poet's name inside another author's poem.
struct MentionHit {
    std::string from_poet; // the mentioning author (poet id)
    std::string to_poet;   // the mentioned poet (poet id)
    std::string poem_id;
    std::string matched;   // the string that matched
    MentionKind kind = MentionKind::Full;
    MentionLocation location = MentionLocation::Body;
    std::size_t position = 0; // byte offset in the searched text
};

/// Directed, weighted mention evidence aggregated per ordered poet pair.
struct MentionEdge {
    std::string from_poet;
    std::string to_poet;
    std::int32_t weight = 0; // == evidence.size()
    std::vector<MentionHit> evidence;
};

namespace detail {

inline std::vector<std::size_t> find_occurrences(std::string_view haystack, std::string_view needle) {
    std::vector<std::size_t> starts;
    if (needle.empty()) return starts;
    std::size_t pos = haystack.find(needle);
    while (pos != std::string_view::npos) {
        starts.push_back(pos);
        pos = haystack.find(needle, pos + 1);
    }
    return starts;
}

} // namespace detail

/// Scans every poem for other poets' names in the title and the raw body.
/// Full names always produce hits; alternative names of at least two
/// characters produce hits that the gate below may still drop. Rules:
///   - an author's own names never count (no self-hits);
///   - when two full names match at the same position, the longer one wins;
///   - an alt-name occurrence lying inside a full-name occurrence of the
///     same poet is the same mention, not extra evidence;
///   - poems whose author cannot be resolved against the poet list are
///     skipped (there is no "from" side to attribute).
inline std::vector<MentionHit> find_mentions(const Corpus& corpus, const std::vector<Poet>& poets) {
    PoetIndex index(poets);
    std::vector<MentionHit> hits;

    struct Span {
        std::size_t start, len;
        std::size_t poet; // index into poets
    };

    for (const Poem& poem : corpus.poems) {
        const Poet* from = index.resolve_author(poem);
        if (!from) continue;

        for (MentionLocation location : {MentionLocation::Title, MentionLocation::Body}) {
            const std::string& text =
                location == MentionLocation::Title ? poem.title : poem.body_raw;
            if (text.empty()) continue;

            std::vector<Span> full_spans;
            for (std::size_t t = 0; t < poets.size(); ++t) {
                if (poets[t].id == from->id) continue;
                for (std::size_t start : detail::find_occurrences(text, poets[t].name))
                    full_spans.push_back(Span{start, poets[t].name.size(), t});
            }
            // longest-match preference at each start position
            std::map<std::size_t, std::size_t> longest_at; // start -> byte length
            for (const Span& s : full_spans) {
                auto [it, inserted] = longest_at.emplace(s.start, s.len);
                if (!inserted) it->second = std::max(it->second, s.len);
            }
            std::erase_if(full_spans, [&](const Span& s) { return s.len != longest_at[s.start]; });

            auto subsumed = [&](std::size_t start, std::size_t len, std::size_t poet) {
                for (const Span& s : full_spans)
                    if (s.poet == poet && s.start <= start && start + len <= s.start + s.len)
                        return true;
                return false;
            };

            std::vector<Span> alt_spans;
            for (std::size_t t = 0; t < poets.size(); ++t) {
                if (poets[t].id == from->id) continue;
                for (const std::string& alt : poets[t].alt_names) {
                    if (utf8::length(alt) < 2) continue; // single characters are hopelessly ambiguous
                    for (std::size_t start : detail::find_occurrences(text, alt))
                        if (!subsumed(start, alt.size(), t))
                            alt_spans.push_back(Span{start, alt.size(), t});
                }
            }

            auto emit = [&](const Span& s, MentionKind kind) {
                MentionHit hit;
                hit.from_poet = from->id;
                hit.to_poet = poets[s.poet].id;
                hit.poem_id = poem.id;
                hit.matched = text.substr(s.start, s.len);
                hit.kind = kind;
                hit.location = location;
                hit.position = s.start;
                hits.push_back(std::move(hit));
            };
            auto by_position = [](const Span& a, const Span& b) {
                return a.start != b.start ? a.start < b.start : a.poet < b.poet;
            };
            std::sort(full_spans.begin(), full_spans.end(), by_position);
            std::sort(alt_spans.begin(), alt_spans.end(), by_position);
            for (const Span& s : full_spans) emit(s, MentionKind::Full);
            for (const Span& s : alt_spans) emit(s, MentionKind::Alt);
        }
    }
    return hits;
}

/// Alt-name evidence on an ordered pair survives only when that pair also
/// has a full-name mention in a different poem. Full-name hits always pass.
inline std::vector<MentionHit> apply_alt_gate(std::vector<MentionHit> hits) {
    std::map<std::pair<std::string, std::string>, std::set<std::string>> full_poems;
    for (const MentionHit& h : hits)
        if (h.kind == MentionKind::Full)
            full_poems[{h.from_poet, h.to_poet}].insert(h.poem_id);

    std::erase_if(hits, [&](const MentionHit& h) {
        if (h.kind == MentionKind::Full) return false;
        auto it = full_poems.find({h.from_poet, h.to_poet});
        if (it == full_poems.end()) return true;
        const std::set<std::string>& poems = it->second;
        return poems.size() == poems.count(h.poem_id); // full hits only in the same poem
    });
    return hits;
}

/// One edge per ordered (from, to) pair, weight = evidence count, sorted by
/// (from, to).
inline std::vector<MentionEdge> build_network(const std::vector<MentionHit>& gated) {
    std::map<std::pair<std::string, std::string>, MentionEdge> edges;
    for (const MentionHit& h : gated) {
        MentionEdge& e = edges[{h.from_poet, h.to_poet}];
        if (e.evidence.empty()) {
            e.from_poet = h.from_poet;
            e.to_poet = h.to_poet;
        }
        e.evidence.push_back(h);
        ++e.weight;
    }
    std::vector<MentionEdge> out;
    out.reserve(edges.size());
    for (auto& [key, edge] : edges) out.push_back(std::move(edge));
    return out;
}

/// True when the poet's lifespan is known and intersects [first, last].
inline bool lifespan_overlaps(const Poet& poet, int first, int last) {
    return poet.birth_year && poet.death_year && *poet.birth_year <= last &&
           *poet.death_year >= first;
}

enum class GraphFormat { EdgeList, Gexf };

namespace detail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

} // namespace detail

/// EDGELIST: tab-separated `from to weight`, one edge per line.
/// GEXF: minimal directed weighted graph document that Gephi-style tools
/// import; node labels are poet names when known.
inline void export_graph(const std::vector<MentionEdge>& edges, const std::vector<Poet>& poets,
                         GraphFormat format, const std::filesystem::path& out_path) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + out_path.string());

    if (format == GraphFormat::EdgeList) {
        for (const MentionEdge& e : edges)
            out << e.from_poet << '\t' << e.to_poet << '\t' << e.weight << '\n';
    } else {
        PoetIndex index(poets);
        std::set<std::string> node_ids;
        for (const MentionEdge& e : edges) {
            node_ids.insert(e.from_poet);
            node_ids.insert(e.to_poet);
        }
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out << "<gexf xmlns=\"http://www.gexf.net/1.2draft\" version=\"1.2\">\n";
        out << "  <graph defaultedgetype=\"directed\">\n";
        out << "    <nodes>\n";
        for (const std::string& id : node_ids) {
            const Poet* poet = index.by_id(id);
            out << "      <node id=\"" << detail::xml_escape(id) << "\" label=\""
                << detail::xml_escape(poet ? poet->name : id) << "\"/>\n";
        }
        out << "    </nodes>\n";
        out << "    <edges>\n";
        std::size_t edge_id = 0;
        for (const MentionEdge& e : edges) {
            out << "      <edge id=\"" << edge_id++ << "\" source=\""
                << detail::xml_escape(e.from_poet) << "\" target=\""
                << detail::xml_escape(e.to_poet) << "\" weight=\"" << e.weight << "\"/>\n";
        }
        out << "    </edges>\n";
        out << "  </graph>\n";
        out << "</gexf>\n";
    }
    out.close();
    if (!out) throw Error("write failure on " + out_path.string());
}

} // namespace tangsong
