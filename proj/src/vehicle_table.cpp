// SPDX-License-Identifier: Apache-2.0
#include "skyground/vehicle_table.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "skyground/error.hpp"

namespace skyground::vehicles {
namespace {

constexpr std::string_view kHeader =
    "brand,model,length_mm,width_mm,height_mm,powertrain,price,doors,seats";

std::string_view trim(std::string_view s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    auto b = std::find_if(s.begin(), s.end(), not_space);
    auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
    return b < e ? std::string_view(&*b, static_cast<std::size_t>(e - b)) : std::string_view{};
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view field, std::size_t row, const char* column) {
    T value{};
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || field.empty()) {
        throw ParseError(row, std::string(column) + " is not a number: '" + std::string(field) + "'");
    }
    return value;
}

bool key_less(const VehicleRecord& a, const VehicleRecord& b) {
    return std::tie(a.brand, a.model) < std::tie(b.brand, b.model);
}

double dim_distance(const VehicleRecord& r, const DimensionsMm& d) {
    const double dl = r.length_mm - d.length, dw = r.width_mm - d.width, dh = r.height_mm - d.height;
    return std::sqrt(dl * dl + dw * dw + dh * dh);
}

}  // namespace

std::string_view to_string(Powertrain p) noexcept {
    switch (p) {
        case Powertrain::ICE: return "ICE";
        case Powertrain::BEV: return "BEV";
        case Powertrain::PHEV: return "PHEV";
        case Powertrain::HEV: return "HEV";
        case Powertrain::Other: return "other";
    }
    return "other";
}

std::optional<Powertrain> parse_powertrain(std::string_view text) noexcept {
    const std::string key = fold_key(text);
    if (key == "ice") return Powertrain::ICE;
    if (key == "bev") return Powertrain::BEV;
    if (key == "phev") return Powertrain::PHEV;
    if (key == "hev") return Powertrain::HEV;
    if (key == "other") return Powertrain::Other;
    return std::nullopt;
}

std::string fold_key(std::string_view text) {
    std::string out(trim(text));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

VehicleTable::VehicleTable(std::vector<VehicleRecord> records) : records_(std::move(records)) {
    for (const auto& r : records_) {
        if (r.brand.empty() || r.model.empty()) {
            throw Error(Errc::InvalidArgument, "vehicle record needs brand and model");
        }
        if (!(r.length_mm > 0 && r.width_mm > 0 && r.height_mm > 0) || r.length_mm < r.width_mm) {
            throw Error(Errc::InvalidArgument, "invalid dimensions for " + r.display_name());
        }
    }
    std::stable_sort(records_.begin(), records_.end(), key_less);
    for (std::size_t i = 1; i < records_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (fold_key(records_[i].brand) == fold_key(records_[j].brand) &&
                fold_key(records_[i].model) == fold_key(records_[j].model)) {
                throw Error(Errc::DuplicateKey, "duplicate vehicle " + records_[i].display_name());
            }
        }
    }
}

const VehicleRecord& VehicleTable::match_dimensions(const DimensionsMm& dims) const {
    if (records_.empty()) throw Error(Errc::EmptyTable, "cannot match against an empty table");
    const VehicleRecord* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    // strict < keeps the first record in sort order on ties
    for (const auto& r : records_) {
        const double d = dim_distance(r, dims);
        if (d < best_dist) {
            best_dist = d;
            best = &r;
        }
    }
    return *best;
}

const VehicleRecord& VehicleTable::lookup(std::string_view brand, std::string_view model) const {
    const std::string b = fold_key(brand), m = fold_key(model);
    for (const auto& r : records_) {
        if (fold_key(r.brand) == b && fold_key(r.model) == m) return r;
    }
    throw Error(Errc::NotFound, "no vehicle '" + std::string(trim(brand)) + " " +
                                    std::string(trim(model)) + "' in table");
}

const VehicleRecord& VehicleTable::lookup_name(std::string_view name) const {
    const std::string key = fold_key(name);
    for (const auto& r : records_) {
        if (fold_key(r.brand) + " " + fold_key(r.model) == key) return r;
    }
    throw Error(Errc::NotFound, "no vehicle '" + std::string(trim(name)) + "' in table");
}

double VehicleTable::min_dimension_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < records_.size(); ++i) {
        for (std::size_t j = i + 1; j < records_.size(); ++j) {
            const auto& b = records_[j];
            gap = std::min(gap, dim_distance(records_[i], {b.length_mm, b.width_mm, b.height_mm}));
        }
    }
    return gap;
}

VehicleTable parse_table(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    bool have_header = false;
    std::vector<VehicleRecord> records;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (!have_header) {
            std::string header;
            for (auto f : split_csv(line)) header += (header.empty() ? "" : ",") + fold_key(f);
            if (header != kHeader) throw ParseError(row, "expected header '" + std::string(kHeader) + "'");
            have_header = true;
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 9) {
            throw ParseError(row, "expected 9 fields, got " + std::to_string(fields.size()));
        }
        VehicleRecord r;
        r.brand = std::string(fields[0]);
        r.model = std::string(fields[1]);
        if (r.brand.empty() || r.model.empty()) throw ParseError(row, "brand and model are required");
        r.length_mm = parse_number<double>(fields[2], row, "length_mm");
        r.width_mm = parse_number<double>(fields[3], row, "width_mm");
        r.height_mm = parse_number<double>(fields[4], row, "height_mm");
        if (!(r.length_mm > 0 && r.width_mm > 0 && r.height_mm > 0)) {
            throw ParseError(row, "dimensions must be positive");
        }
        if (r.length_mm < r.width_mm) throw ParseError(row, "length_mm must be >= width_mm");
        const auto pt = parse_powertrain(fields[5]);
        if (!pt) throw ParseError(row, "unknown powertrain '" + std::string(fields[5]) + "'");
        r.powertrain = *pt;
        r.price = parse_number<double>(fields[6], row, "price");
        r.doors = parse_number<int>(fields[7], row, "doors");
        r.seats = parse_number<int>(fields[8], row, "seats");
        if (r.price < 0 || r.doors < 0 || r.seats < 0) throw ParseError(row, "negative attribute");
        records.push_back(std::move(r));
    }
    if (!have_header) throw ParseError(1, "missing header");
    if (records.empty()) throw Error(Errc::EmptyTable, "vehicle table has no rows");
    return VehicleTable(std::move(records));
}

VehicleTable load_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    return parse_table(in);
}

void write_table(std::ostream& out, const VehicleTable& table) {
    out << kHeader << '\n';
    for (const auto& r : table.records()) {
        // {} is the shortest form that parses back to the same double
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.brand, r.model, r.length_mm, r.width_mm, r.height_mm,
                           to_string(r.powertrain), r.price, r.doors, r.seats);
    }
}

}  // namespace skyground::vehicles
