#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "logprose/config.hpp"
#include "logprose/extract.hpp"

namespace logprose {

struct LabeledCsvRow {
    std::string message;
    Level level = Level::info;
    int structure = 1;
    int information = 1;
    int wording = 1;

    int label(std::string_view aspect) const;
    friend bool operator==(const LabeledCsvRow&, const LabeledCsvRow&) = default;
};

// RFC 4180 records; quoted fields may contain commas, doubled quotes and line
// breaks. Throws MalformedCsv with the 1-based record number.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

void write_csv_record(std::ostream& out, const std::vector<std::string>& fields);

// Requires a header naming every mapped column; extra columns are ignored.
std::vector<LabeledCsvRow> read_labeled_csv(std::istream& in, const ColumnMapping& columns = {});

// Writes the canonical header message,level,structure,information,wording.
void write_labeled_csv(std::ostream& out, const std::vector<LabeledCsvRow>& rows);

} // namespace logprose
