#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tsms/io.hpp"
#include "tsms/transport.hpp"

#include "helpers.hpp"

using namespace tsms;
using namespace testutil;

namespace {

std::string strip_ws(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

} // namespace

TEST_CASE("series XML parsing") {
    const char* doc = R"(<document>
        <timeseries><date>2020-01-01</date><value>10.5</value></timeseries>
        <timeseries><date>2020-01-02</date><value>NaN</value></timeseries>
    </document>)";
    auto rows = io::read_series_xml(doc);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].first == "2020-01-01");
    CHECK(rows[0].second == 10.5);
    CHECK(std::isnan(rows[1].second));

    CHECK_THROWS_AS(io::read_series_xml("<document><timeseries></document>"),
                    ParseError);
    CHECK_THROWS_AS(io::read_series_xml("<nothing/>"), ParseError);
    CHECK_THROWS_AS(
        io::read_series_xml("<document><timeseries><date>2020-01-01</date>"
                            "<value>abc</value></timeseries></document>"),
        ParseError);
}

TEST_CASE("rows align to the calendar with ! for missing dates") {
    auto cal = std::make_shared<const Calendar>(
        std::vector<std::string>{"2020-01-01", "2020-01-02", "2020-01-03"},
        TimeUnit::Day);
    std::vector<std::pair<std::string, double>> rows = {
        {"2020-01-01", 1.0}, {"2020-01-03", std::nan("")}};
    auto s = io::series_from_rows("PX1", rows, cal);
    CHECK(s.values()[0] == R(1.0));
    CHECK(s.values()[1].is_empty());   // date absent from the file
    CHECK(s.values()[2].is_unknown()); // NaN encodes ?

    rows.push_back({"2021-06-06", 5.0});
    CHECK_THROWS_AS(io::series_from_rows("PX1", rows, cal), ParseError);
}

TEST_CASE("XML round-trip is content-identical modulo whitespace") {
    const std::string original =
        "<document>"
        "<timeseries><date>2020-01-01</date><value>10.5</value></timeseries>"
        "<timeseries><date>2020-01-03</date><value>NaN</value></timeseries>"
        "<timeseries><date>2020-01-04</date><value>-3</value></timeseries>"
        "</document>";
    auto rows = io::read_series_xml(original);
    auto cal = std::make_shared<const Calendar>(
        std::vector<std::string>{"2020-01-01", "2020-01-02", "2020-01-03",
                                 "2020-01-04"},
        TimeUnit::Day);
    auto s = io::series_from_rows("PX1", rows, cal);
    // 2020-01-02 is ! and stays out of the export.
    CHECK(strip_ws(io::series_to_xml(s)) == strip_ws(original));
}

TEST_CASE("store saves and loads series") {
    const std::string dir = "store_test_dir";
    std::filesystem::remove_all(dir);
    {
        io::Store store(dir);
        CHECK_FALSE(store.has_calendar());
        auto cal = make_synthetic_calendar(5, TimeUnit::Day);
        store.set_calendar(cal);
        auto s = TimeSeries("PX1", store.calendar(), 0, 4,
                            {R(1), R(2), E(), U(), R(5)});
        store.save_series(s);
        CHECK(store.has_series("PX1"));
        CHECK(store.list_series() == std::vector<std::string>{"PX1"});
    }
    {
        io::Store store(dir);
        auto back = store.load_series("PX1");
        CHECK(back.values()[0] == R(1));
        CHECK(back.values()[2].is_empty());
        CHECK(back.values()[3].is_unknown());
        CHECK(back.values()[4] == R(5));
        CHECK_THROWS_AS(store.load_series("NOPE"), UnknownBaseSeries);
        CHECK_THROWS_AS(store.load_series("../evil"), ParseError);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("trip CSV ingestion") {
    const char* csv =
        "road_id,lat,lon,legal_speed,speed,accel,fuel\n"
        "1,48.8,2.3,50,10,0.5,1.2\n"
        "1,48.8,2.3,50,12,,1.3\n"
        "1,48.8,2.3,50,,0.1,\n";
    Trip trip = io::read_trip_csv(csv, 1.0, SpeedUnit::Kmh);
    CHECK(trip.speed.length() == 3);
    CHECK(trip.speed.values()[0] == R(10));
    CHECK(trip.speed.values()[2].is_unknown());
    REQUIRE(trip.accel.has_value());
    CHECK(trip.accel->values()[1].is_unknown());
    REQUIRE(trip.fuel.has_value());
    CHECK(trip.fuel->values()[1] == R(1.3));
    REQUIRE(trip.legal_speed.has_value());

    CHECK_THROWS_AS(io::read_trip_csv("speed\n", 1.0, SpeedUnit::Kmh), ParseError);
    CHECK_THROWS_AS(io::read_trip_csv("road_id,bogus\n1,2\n", 1.0, SpeedUnit::Kmh),
                    ParseError);
    CHECK_THROWS_AS(io::read_trip_csv("speed\n1\n2,3\n", 1.0, SpeedUnit::Kmh),
                    ParseError);
}

TEST_CASE("calendar file round-trip") {
    const std::string path = "calendar_test.txt";
    auto cal = make_synthetic_calendar(4, TimeUnit::Hour);
    io::write_calendar_file(path, *cal);
    auto back = io::read_calendar_file(path, TimeUnit::Hour);
    CHECK(back->labels() == cal->labels());
    std::remove(path.c_str());

    {
        std::ofstream out(path);
        out << "2020-01-02\n2020-01-01\n";
    }
    CHECK_THROWS_AS(io::read_calendar_file(path, TimeUnit::Day), CalendarOrderError);
    std::remove(path.c_str());
}
