#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "tangsong/corpus.hpp"

namespace tangsong {

/// One poet's use of a query word, as chart-ready interval data.
struct TimelineRow {
    std::string word;
    std::string poet_id;
    std::string poet_name;
    int birth_year = 0;
    int death_year = 0;
    std::set<Collection> collections;
    std::vector<std::string> poem_ids;
};

struct WordHistory {
    std::string word;
    std::vector<TimelineRow> rows;           // sorted by birth year, then poet id
    std::uint64_t excluded_poets = 0;        // matched poets without a known lifespan
};

/// Finds every poet who used `word` (contiguous match on body_norm). Poets
/// with both lifespan years known become rows; matched poets with unknown
/// years, including authors missing from the poet list entirely, are only
/// tallied.
inline WordHistory word_history(const std::string& word, const Corpus& corpus,
                                const std::vector<Poet>& poets) {
    if (word.empty()) throw Error("word_history: empty word");
    const std::u32string needle = utf8::decode(word);

    PoetIndex index(poets);
    std::map<std::string, TimelineRow> by_poet;     // poet id -> row under construction
    std::set<std::string> unknown_lifespan;         // poet ids or unresolved author names

    for (const Poem& poem : corpus.poems) {
        if (poem.body_norm.find(needle) == std::u32string::npos) continue;
        const Poet* poet = index.resolve_author(poem);
        if (!poet) {
            unknown_lifespan.insert("?" + poem.author_name);
            continue;
        }
        if (!poet->birth_year || !poet->death_year) {
            unknown_lifespan.insert(poet->id);
            continue;
        }
        TimelineRow& row = by_poet[poet->id];
        if (row.poem_ids.empty()) {
            row.word = word;
            row.poet_id = poet->id;
            row.poet_name = poet->name;
            row.birth_year = *poet->birth_year;
            row.death_year = *poet->death_year;
        }
        row.collections.insert(poem.collection);
        row.poem_ids.push_back(poem.id);
    }

    WordHistory history;
    history.word = word;
    history.excluded_poets = unknown_lifespan.size();
    for (auto& [id, row] : by_poet) {
        std::sort(row.poem_ids.begin(), row.poem_ids.end());
        history.rows.push_back(std::move(row));
    }
    std::sort(history.rows.begin(), history.rows.end(),
              [](const TimelineRow& a, const TimelineRow& b) {
                  if (a.birth_year != b.birth_year) return a.birth_year < b.birth_year;
                  return a.poet_id < b.poet_id;
              });
    return history;
}

/// JSON array of row objects with keys word, poet, birth, death, collections,
/// poems, in that order; deterministic row order.
inline void emit_timeline(const WordHistory& history, const std::filesystem::path& out_path) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const TimelineRow& row : history.rows) {
        nlohmann::ordered_json obj;
        obj["word"] = row.word;
        obj["poet"] = row.poet_name;
        obj["birth"] = row.birth_year;
        obj["death"] = row.death_year;
        auto collections = nlohmann::ordered_json::array();
        for (Collection c : row.collections) collections.push_back(std::string(to_string(c)));
        obj["collections"] = collections;
        obj["poems"] = row.poem_ids;
        rows.push_back(std::move(obj));
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + out_path.string());
    out << rows.dump(2) << '\n';
    out.close();
    if (!out) throw Error("write failure on " + out_path.string());
}

} // namespace tangsong
