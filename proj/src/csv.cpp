#include "growthdyn/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "growthdyn/errors.hpp"

namespace growthdyn::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
            field.pop_back();
        std::size_t from = 0;
        while (from < field.size() && field[from] == ' ') ++from;
        fields.push_back(field.substr(from));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

int parse_year(const std::string& text, const std::string& path, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const int year = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return year;
    } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": invalid year '" +
                         text + "'");
    }
}

double parse_value(const std::string& text, const std::string& value_name,
                   const std::string& path, std::size_t line_no) {
    double value = 0.0;
    try {
        std::size_t used = 0;
        value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": invalid " +
                         value_name + " '" + text + "'");
    }
    if (!(value > 0.0) || !std::isfinite(value))
        throw NonPositiveValue(path + ":" + std::to_string(line_no) +
                               ": non-positive " + value_name + " '" + text + "'");
    return value;
}

bool is_integer(const std::string& text) {
    if (text.empty()) return false;
    std::size_t from = text[0] == '-' ? 1 : 0;
    if (from == text.size()) return false;
    return std::all_of(text.begin() + from, text.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

std::vector<ValueRecord> read_value_table(const std::string& path,
                                          const std::string& value_name) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line))
        throw SchemaError(path + ":1: empty file");
    const std::vector<std::string> header = split_line(line);
    if (header.empty() || header[0] != "region_id")
        throw SchemaError(path + ":1: first column must be region_id");

    std::vector<ValueRecord> records;
    std::size_t line_no = 1;

    const bool wide = header.size() >= 2 && is_integer(header[1]);
    if (wide) {
        std::vector<int> years;
        for (std::size_t k = 1; k < header.size(); ++k)
            years.push_back(parse_year(header[k], path, 1));
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const std::vector<std::string> fields = split_line(line);
            if (fields.size() != header.size())
                throw SchemaError(path + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " columns, found " +
                                  std::to_string(fields.size()));
            for (std::size_t k = 0; k < years.size(); ++k)
                records.push_back({fields[0], years[k],
                                   parse_value(fields[k + 1], value_name, path, line_no),
                                   ""});
        }
        return records;
    }

    if (header.size() < 3 || header[1] != "year" || header[2] != value_name)
        throw SchemaError(path + ":1: expected header region_id,year," + value_name +
                          "[,dev_class]");
    const bool has_dev_class = header.size() >= 4 && header[3] == "dev_class";
    if (header.size() > (has_dev_class ? 4u : 3u))
        throw SchemaError(path + ":1: unexpected extra columns");

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() < 3 || fields.size() > (has_dev_class ? 4u : 3u))
            throw SchemaError(path + ":" + std::to_string(line_no) +
                              ": wrong number of columns");
        ValueRecord rec;
        rec.region_id = fields[0];
        rec.year = parse_year(fields[1], path, line_no);
        rec.value = parse_value(fields[2], value_name, path, line_no);
        if (fields.size() >= 4) rec.dev_class = fields[3];
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<RegionYearObservation> ingest(const std::string& emissions_path,
                                          const std::string& gdp_path) {
    const auto index_records = [](const std::vector<ValueRecord>& records,
                                  const std::string& path) {
        std::map<std::pair<std::string, int>, ValueRecord> index;
        for (const auto& rec : records)
            if (!index.emplace(std::make_pair(rec.region_id, rec.year), rec).second)
                throw DuplicateRecord(path + ": duplicate record for region " +
                                      rec.region_id + ", year " + std::to_string(rec.year));
        return index;
    };
    const auto emissions =
        index_records(read_value_table(emissions_path, "emissions"), emissions_path);
    auto gdp = index_records(read_value_table(gdp_path, "gdp"), gdp_path);

    std::vector<RegionYearObservation> out;
    out.reserve(emissions.size());
    for (const auto& [key, rec] : emissions) {
        const auto it = gdp.find(key);
        if (it == gdp.end())
            throw JoinError("region " + key.first + ", year " + std::to_string(key.second) +
                            " present in " + emissions_path + " but missing from " +
                            gdp_path);
        RegionYearObservation obs;
        obs.region_id = rec.region_id;
        obs.year = rec.year;
        obs.emissions = rec.value;
        obs.gdp = it->second.value;
        obs.dev_class = !rec.dev_class.empty() ? rec.dev_class : it->second.dev_class;
        out.push_back(std::move(obs));
        gdp.erase(it);
    }
    if (!gdp.empty()) {
        const auto& key = gdp.begin()->first;
        throw JoinError("region " + key.first + ", year " + std::to_string(key.second) +
                        " present in " + gdp_path + " but missing from " + emissions_path);
    }
    return out;
}

void write_observations(const std::vector<RegionYearObservation>& observations,
                        const std::string& emissions_path,
                        const std::string& gdp_path) {
    const bool with_dev_class =
        std::any_of(observations.begin(), observations.end(),
                    [](const RegionYearObservation& o) { return !o.dev_class.empty(); });

    std::vector<const RegionYearObservation*> sorted;
    sorted.reserve(observations.size());
    for (const auto& obs : observations) sorted.push_back(&obs);
    std::sort(sorted.begin(), sorted.end(),
              [](const RegionYearObservation* a, const RegionYearObservation* b) {
                  if (a->region_id != b->region_id) return a->region_id < b->region_id;
                  return a->year < b->year;
              });

    char buf[40];
    std::ostringstream em, gd;
    em << "region_id,year,emissions" << (with_dev_class ? ",dev_class" : "") << "\n";
    gd << "region_id,year,gdp\n";
    for (const auto* obs : sorted) {
        std::snprintf(buf, sizeof(buf), "%.17g", obs->emissions);
        em << obs->region_id << ',' << obs->year << ',' << buf;
        if (with_dev_class) em << ',' << obs->dev_class;
        em << '\n';
        std::snprintf(buf, sizeof(buf), "%.17g", obs->gdp);
        gd << obs->region_id << ',' << obs->year << ',' << buf << '\n';
    }
    write_file_atomic(emissions_path, em.str());
    write_file_atomic(gdp_path, gd.str());
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out << content;
        if (!out) throw IoError("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot rename " + tmp + " to " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string format_sig(double value, int significant_digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, value);
    return buf;
}

std::string file_hash(const std::string& path) {
    const std::string bytes = read_file(path);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace growthdyn::csv
