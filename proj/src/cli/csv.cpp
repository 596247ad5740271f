#include "logprose/csv.hpp"

#include <iterator>
#include <map>

#include "logprose/errors.hpp"

namespace logprose {

namespace {

bool needs_quotes(std::string_view field) {
    if (field.empty()) return false;
    if (field.front() == ' ' || field.back() == ' ') return true;
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

int parse_label(const std::string& value, std::size_t row, const std::string& column) {
    if (value == "1") return 1;
    if (value == "0") return 0;
    throw MalformedCsv(row, "column '" + column + "' must be 0 or 1, got '" + value + "'");
}

} // namespace

int LabeledCsvRow::label(std::string_view aspect) const {
    if (aspect == "structure") return structure;
    if (aspect == "information") return information;
    if (aspect == "wording") return wording;
    throw BadInput("unknown aspect '" + std::string(aspect) + "'");
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    std::size_t i = 0;
    const auto n = text.size();
    std::size_t start = 0;
    if (text.starts_with("\xEF\xBB\xBF")) start = i = 3;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    if (start == n) return records;
    while (i < n) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                if (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                    throw MalformedCsv(records.size() + 1, "unexpected character after closing quote");
                }
                continue;
            }
            field += c;
            ++i;
            continue;
        }
        if (c == '"') {
            if (!field.empty() || was_quoted) throw MalformedCsv(records.size() + 1, "quote inside unquoted field");
            quoted = true;
            was_quoted = true;
            ++i;
        } else if (c == ',') {
            end_field();
            ++i;
        } else if (c == '\r' || c == '\n') {
            end_record();
            i += (c == '\r' && i + 1 < n && text[i + 1] == '\n') ? 2 : 1;
        } else {
            field += c;
            ++i;
        }
    }
    if (quoted) throw MalformedCsv(records.size() + 1, "unterminated quoted field");
    const bool ends_with_newline = text.back() == '\n' || text.back() == '\r';
    if (!ends_with_newline) end_record();
    return records;
}

void write_csv_record(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        const auto& f = fields[i];
        // A lone empty field would read back as a blank line, so quote it.
        if (needs_quotes(f) || (fields.size() == 1 && f.empty())) {
            out << '"';
            for (char c : f) {
                if (c == '"') out << '"';
                out << c;
            }
            out << '"';
        } else {
            out << f;
        }
    }
    out << "\r\n";
}

std::vector<LabeledCsvRow> read_labeled_csv(std::istream& in, const ColumnMapping& columns) {
    const auto records = parse_csv(in);
    if (records.empty()) throw MalformedCsv(1, "missing header");
    const auto& header = records.front();
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < header.size(); ++i) position.emplace(header[i], i);

    auto column = [&](const std::string& name) {
        auto it = position.find(name);
        if (it == position.end()) throw MalformedCsv(1, "missing column '" + name + "'");
        return it->second;
    };
    const auto c_message = column(columns.message);
    const auto c_level = column(columns.level);
    const auto c_s = column(columns.structure);
    const auto c_i = column(columns.information);
    const auto c_w = column(columns.wording);

    std::vector<LabeledCsvRow> rows;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const auto row_number = r + 1;
        if (rec.size() == 1 && rec[0].empty()) continue;  // blank line
        if (rec.size() != header.size()) {
            throw MalformedCsv(row_number, "expected " + std::to_string(header.size()) + " fields, got " +
                                               std::to_string(rec.size()));
        }
        LabeledCsvRow row;
        row.message = rec[c_message];
        if (row.message.empty()) throw MalformedCsv(row_number, "empty message");
        try {
            row.level = parse_level(rec[c_level]);
        } catch (const UnknownLevel&) {
            throw MalformedCsv(row_number, "unknown level '" + rec[c_level] + "'");
        }
        row.structure = parse_label(rec[c_s], row_number, columns.structure);
        row.information = parse_label(rec[c_i], row_number, columns.information);
        row.wording = parse_label(rec[c_w], row_number, columns.wording);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_labeled_csv(std::ostream& out, const std::vector<LabeledCsvRow>& rows) {
    write_csv_record(out, {"message", "level", "structure", "information", "wording"});
    for (const auto& r : rows) {
        write_csv_record(out, {r.message, std::string(to_string(r.level)), std::to_string(r.structure),
                               std::to_string(r.information), std::to_string(r.wording)});
    }
}

} // namespace logprose
