#include "tsms/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "tsms/errors.hpp"
#include "tsms/series_name.hpp"

namespace tsms::io {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << content;
}

// Minimal scanner for the fixed <document><timeseries><date/><value/>
// </timeseries>*</document> shape; tolerant of whitespace and attributes.
struct XmlScanner {
    const std::string& text;
    std::size_t pos = 0;

    std::size_t line_of(std::size_t at) const {
        std::size_t line = 1;
        for (std::size_t i = 0; i < at && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        return line;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at line " + std::to_string(line_of(pos)));
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    bool try_open(const std::string& tag) {
        skip_ws();
        std::size_t save = pos;
        if (text.compare(pos, tag.size() + 1, "<" + tag) != 0) return false;
        pos += tag.size() + 1;
        char c = pos < text.size() ? text[pos] : '\0';
        if (c != '>' && !std::isspace(static_cast<unsigned char>(c))) {
            pos = save;
            return false;
        }
        while (pos < text.size() && text[pos] != '>') ++pos;
        if (pos == text.size()) fail("unterminated <" + tag + ">");
        ++pos;
        return true;
    }

    void expect_open(const std::string& tag) {
        if (!try_open(tag)) fail("expected <" + tag + ">");
    }

    void expect_close(const std::string& tag) {
        skip_ws();
        if (text.compare(pos, tag.size() + 3, "</" + tag + ">") != 0)
            fail("expected </" + tag + ">");
        pos += tag.size() + 3;
    }

    std::string text_until_close(const std::string& tag) {
        std::size_t begin = pos;
        std::size_t at = text.find("</" + tag + ">", pos);
        if (at == std::string::npos) fail("missing </" + tag + ">");
        pos = at + tag.size() + 3;
        std::string out = text.substr(begin, at - begin);
        // trim
        std::size_t b = out.find_first_not_of(" \t\r\n");
        std::size_t e = out.find_last_not_of(" \t\r\n");
        return b == std::string::npos ? std::string() : out.substr(b, e - b + 1);
    }
};

} // namespace

std::vector<std::pair<std::string, double>> read_series_xml(const std::string& text) {
    XmlScanner sc{text};
    sc.skip_ws();
    if (sc.text.compare(sc.pos, 5, "<?xml") == 0) {
        std::size_t end = sc.text.find("?>", sc.pos);
        if (end == std::string::npos) sc.fail("unterminated XML declaration");
        sc.pos = end + 2;
    }
    sc.expect_open("document");
    std::vector<std::pair<std::string, double>> rows;
    while (sc.try_open("timeseries")) {
        sc.expect_open("date");
        std::string date = sc.text_until_close("date");
        sc.expect_open("value");
        std::string value_text = sc.text_until_close("value");
        sc.expect_close("timeseries");
        double v;
        if (value_text == "NaN" || value_text == "nan" || value_text == "-NaN") {
            v = std::nan("");
        } else {
            try {
                std::size_t used = 0;
                v = std::stod(value_text, &used);
                if (used != value_text.size()) throw std::invalid_argument(value_text);
            } catch (const std::exception&) {
                sc.fail("bad <value> content '" + value_text + "'");
            }
        }
        rows.emplace_back(std::move(date), v);
    }
    sc.expect_close("document");
    return rows;
}

std::vector<std::pair<std::string, double>> read_series_xml_file(const std::string& path) {
    return read_series_xml(read_file(path));
}

std::string series_to_xml(const TimeSeries& s) {
    std::ostringstream out;
    out << "<document>\n";
    for (std::size_t i = s.start(); i <= s.end(); ++i) {
        const Value& v = s.at(i);
        if (v.is_empty()) continue; // ! means no entry for that instant
        out << "  <timeseries><date>" << s.calendar()->label(i) << "</date><value>";
        if (v.is_unknown()) out << "NaN";
        else out << format_number(v.real_value());
        out << "</value></timeseries>\n";
    }
    out << "</document>\n";
    return out.str();
}

void write_series_xml_file(const std::string& path, const TimeSeries& s) {
    write_file(path, series_to_xml(s));
}

TimeSeries series_from_rows(const std::string& name,
                            const std::vector<std::pair<std::string, double>>& rows,
                            CalendarPtr calendar) {
    std::vector<Value> values(calendar->size(), Value::empty());
    for (const auto& [date, v] : rows) {
        std::size_t idx = calendar->index_of(date);
        if (idx == Calendar::npos)
            throw ParseError("date " + date + " not in the calendar");
        values[idx] = std::isnan(v) ? Value::unknown() : Value::real(v);
    }
    return TimeSeries(name, calendar, 0, calendar->size() - 1, std::move(values));
}

CalendarPtr calendar_from_rows(const std::vector<std::pair<std::string, double>>& rows,
                               TimeUnit unit) {
    std::vector<std::string> labels;
    labels.reserve(rows.size());
    for (const auto& [date, v] : rows) labels.push_back(date);
    return std::make_shared<const Calendar>(std::move(labels), unit);
}

CalendarPtr read_calendar_file(const std::string& path, TimeUnit unit) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open calendar file: " + path);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (!line.empty()) labels.push_back(line);
    }
    return std::make_shared<const Calendar>(std::move(labels), unit);
}

void write_calendar_file(const std::string& path, const Calendar& calendar) {
    std::ostringstream out;
    for (const auto& label : calendar.labels()) out << label << "\n";
    write_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Trip CSV

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

Value cell_from_csv(const std::string& field, std::size_t lineno) {
    if (field.empty()) return Value::unknown();
    try {
        std::size_t used = 0;
        double v = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
        return std::isnan(v) ? Value::unknown() : Value::real(v);
    } catch (const std::exception&) {
        throw ParseError("bad CSV field '" + field + "' at line " + std::to_string(lineno));
    }
}

} // namespace

Trip read_trip_csv(const std::string& text, double dt, SpeedUnit unit) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty trip CSV");
    auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"road_id", "lat",   "lon", "legal_speed",
                                               "speed",   "accel", "fuel"};
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    if (!col.count("speed"))
        throw ParseError("trip CSV needs at least a speed column");
    for (const auto& name : header) {
        if (std::find(expected.begin(), expected.end(), name) == expected.end())
            throw ParseError("unexpected trip CSV column: " + name);
    }

    std::vector<std::vector<Value>> columns(header.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError("trip CSV row with " + std::to_string(fields.size()) +
                             " fields at line " + std::to_string(lineno));
        for (std::size_t i = 0; i < fields.size(); ++i)
            columns[i].push_back(cell_from_csv(fields[i], lineno));
    }
    if (columns[col["speed"]].empty()) throw ParseError("trip CSV has no samples");

    const std::size_t n = columns[col["speed"]].size();
    CalendarPtr cal = make_synthetic_calendar(n, TimeUnit::Second);
    // A header-only column with no data counts as absent.
    auto series = [&](const char* name) -> std::optional<TimeSeries> {
        auto it = col.find(name);
        if (it == col.end()) return std::nullopt;
        bool any_real = false;
        for (const Value& v : columns[it->second]) any_real = any_real || v.is_real();
        if (!any_real) return std::nullopt;
        return TimeSeries(name, cal, 0, n - 1, columns[it->second]);
    };

    Trip trip{.speed = TimeSeries("speed", cal, 0, n - 1, columns[col["speed"]])};
    trip.accel = series("accel");
    trip.fuel = series("fuel");
    trip.legal_speed = series("legal_speed");
    trip.lat = series("lat");
    trip.lon = series("lon");
    trip.road = series("road_id");
    trip.dt = dt;
    trip.speed_unit = unit;
    return trip;
}

Trip read_trip_csv_file(const std::string& path, double dt, SpeedUnit unit) {
    return read_trip_csv(read_file(path), dt, unit);
}

// ---------------------------------------------------------------------------
// Store

Store::Store(std::string dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
}

bool Store::has_calendar() const { return fs::exists(fs::path(dir_) / "calendar.txt"); }

CalendarPtr Store::calendar() const {
    fs::path cal_path = fs::path(dir_) / "calendar.txt";
    if (!fs::exists(cal_path)) throw ParseError("store has no calendar: " + dir_);
    TimeUnit unit = TimeUnit::Day;
    fs::path unit_path = fs::path(dir_) / "unit.txt";
    if (fs::exists(unit_path)) {
        std::ifstream in(unit_path);
        std::string u;
        if (in >> u) unit = time_unit_from_string(u);
    }
    return read_calendar_file(cal_path.string(), unit);
}

void Store::set_calendar(const CalendarPtr& calendar) {
    write_calendar_file((fs::path(dir_) / "calendar.txt").string(), *calendar);
    write_file((fs::path(dir_) / "unit.txt").string(), to_string(calendar->unit()) + "\n");
}

std::string Store::series_path(const std::string& name) const {
    for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
            throw ParseError("series name not storable as a file: " + name);
    return (fs::path(dir_) / (name + ".xml")).string();
}

void Store::save_series(const TimeSeries& s) {
    write_series_xml_file(series_path(s.name()), s);
}

bool Store::has_series(const std::string& name) const {
    return fs::exists(series_path(name));
}

TimeSeries Store::load_series(const std::string& name) const {
    if (!has_series(name)) throw UnknownBaseSeries(name);
    return series_from_rows(name, read_series_xml_file(series_path(name)), calendar());
}

std::vector<std::string> Store::list_series() const {
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(dir_)) {
        if (entry.path().extension() == ".xml") out.push_back(entry.path().stem().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace tsms::io
