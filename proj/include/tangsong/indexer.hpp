#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tangsong/corpus.hpp"
#include "tangsong/error.hpp"
#include "tangsong/utf8.hpp"

namespace tangsong {

/// The indexed character list V: a bijection between the characters that
/// occur in the corpus and the indexes 0..size()-1, assigned in
/// first-encounter order.
class Vocabulary {
public:
    std::int32_t add(char32_t c) {
        auto [it, inserted] = to_index_.emplace(c, static_cast<std::int32_t>(to_char_.size()));
        if (inserted) to_char_.push_back(c);
        return it->second;
    }

    std::optional<std::int32_t> index_of(char32_t c) const {
        auto it = to_index_.find(c);
        if (it == to_index_.end()) return std::nullopt;
        return it->second;
    }

    char32_t char_at(std::int32_t index) const {
        if (index < 0 || static_cast<std::size_t>(index) >= to_char_.size())
            throw Error("vocabulary index out of range: " + std::to_string(index));
        return to_char_[static_cast<std::size_t>(index)];
    }

    std::int32_t size() const { return static_cast<std::int32_t>(to_char_.size()); }
    const std::u32string& chars() const { return to_char_; }

private:
    std::unordered_map<char32_t, std::int32_t> to_index_;
    std::u32string to_char_;
};

/// Scan order is poems sorted by id, characters left to right, so two builds
/// over the same corpus assign identical indexes.
inline Vocabulary build_vocab(const Corpus& corpus) {
    std::vector<const Poem*> order;
    order.reserve(corpus.poems.size());
    for (const Poem& p : corpus.poems) order.push_back(&p);
    std::sort(order.begin(), order.end(),
              [](const Poem* a, const Poem* b) { return a->id < b->id; });
    Vocabulary vocab;
    for (const Poem* p : order)
        for (char32_t c : p->body_norm) vocab.add(c);
    return vocab;
}

/// A poem as an index sequence under a Vocabulary. `text` and `segments`
/// mirror body_norm and its raw-contiguity segments so fragment extraction
/// can work from the encoded form alone.
struct EncodedPoem {
    std::string poem_id;
    std::vector<std::int32_t> indexes;   // one per body_norm character
    std::vector<std::int32_t> distinct;  // sorted unique indexes
    std::u32string text;
    std::vector<std::uint32_t> segments;
};

inline EncodedPoem encode_poem(const Poem& poem, const Vocabulary& vocab) {
    EncodedPoem enc;
    enc.poem_id = poem.id;
    enc.indexes.reserve(poem.body_norm.size());
    for (char32_t c : poem.body_norm) {
        auto idx = vocab.index_of(c);
        if (!idx)
            throw Error("character \"" + utf8::encode(c) + "\" of poem " + poem.id +
                        " is not in the vocabulary");
        enc.indexes.push_back(*idx);
    }
    enc.distinct = enc.indexes;
    std::sort(enc.distinct.begin(), enc.distinct.end());
    enc.distinct.erase(std::unique(enc.distinct.begin(), enc.distinct.end()), enc.distinct.end());
    enc.text = poem.body_norm;
    enc.segments = poem.segments;
    return enc;
}

/// Vocabulary file: one character per line; the 0-based line number is the
/// index.
inline void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write vocabulary file: " + path.string());
    for (char32_t c : vocab.chars()) {
        out << utf8::encode(c) << '\n';
    }
    if (!out) throw Error("write failure on " + path.string());
}

inline Vocabulary load_vocab(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open vocabulary file: " + path.string());
    Vocabulary vocab;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::u32string chars = utf8::decode(line);
        if (chars.size() != 1)
            throw Error(path.string() + ":" + std::to_string(lineno) +
                        ": expected exactly one character");
        if (vocab.index_of(chars[0]))
            throw Error(path.string() + ":" + std::to_string(lineno) +
                        ": duplicate character " + line);
        vocab.add(chars[0]);
    }
    return vocab;
}

} // namespace tangsong
