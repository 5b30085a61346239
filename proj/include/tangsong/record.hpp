#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tangsong/corpus.hpp"
#include "tangsong/findcommon.hpp"

namespace tangsong {

/// Record line layout, fixed for bit-exact files:
///   <author>_<viewpoint_id>|||<author>_<other_id>|||[f1, f2, ...]
/// No spaces around "|||"; fragments joined by ", ".
inline std::string format_record(const ComparisonRecord& rec, const Corpus& corpus) {
    const Poem& view = corpus.at(rec.viewpoint_id);
    const Poem& other = corpus.at(rec.other_id);
    if (rec.fragments.empty())
        throw Error("format_record: empty fragment list for " + rec.viewpoint_id);
    std::string line;
    line += view.author_name;
    line += '_';
    line += view.id;
    line += "|||";
    line += other.author_name;
    line += '_';
    line += other.id;
    line += "|||[";
    bool first = true;
    for (const Fragment& f : rec.fragments) {
        if (!first) line += ", ";
        line += utf8::encode(f.text);
        first = false;
    }
    line += ']';
    return line;
}

struct ParsedRecord {
    std::string viewpoint_author;
    std::string viewpoint_id;
    std::string other_author;
    std::string other_id;
    std::vector<std::string> fragments; // UTF-8 fragment texts
};

namespace detail {

// Author names cannot contain '_' (enforced at load), so the first '_'
// separates author from id.
inline void parse_header_field(std::string_view field, std::string& author, std::string& id,
                               std::string_view line) {
    auto sep = field.find('_');
    if (sep == std::string_view::npos)
        throw Error("record header field without '_': " + std::string(line));
    author = std::string(field.substr(0, sep));
    id = std::string(field.substr(sep + 1));
    if (id.empty())
        throw Error("record header field with empty poem id: " + std::string(line));
}

} // namespace detail

inline ParsedRecord parse_record(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto sep = line.find("|||", start);
        if (sep == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, sep - start));
        start = sep + 3;
    }
    if (fields.size() != 3)
        throw Error("record with " + std::to_string(fields.size()) +
                    " fields, expected 3: " + std::string(line));

    ParsedRecord rec;
    detail::parse_header_field(fields[0], rec.viewpoint_author, rec.viewpoint_id, line);
    detail::parse_header_field(fields[1], rec.other_author, rec.other_id, line);

    std::string_view list = fields[2];
    if (list.size() < 2 || list.front() != '[' || list.back() != ']')
        throw Error("record fragment field is not bracketed: " + std::string(line));
    list = list.substr(1, list.size() - 2);
    if (list.empty())
        throw Error("record with empty fragment list: " + std::string(line));
    std::size_t pos = 0;
    while (true) {
        auto sep = list.find(", ", pos);
        if (sep == std::string_view::npos) {
            rec.fragments.emplace_back(list.substr(pos));
            break;
        }
        rec.fragments.emplace_back(list.substr(pos, sep - pos));
        pos = sep + 2;
    }
    for (const std::string& f : rec.fragments)
        if (f.empty())
            throw Error("record with empty fragment: " + std::string(line));
    return rec;
}

} // namespace tangsong
