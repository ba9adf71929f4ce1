#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tsms/calendar.hpp"
#include "tsms/time_series.hpp"
#include "tsms/transport.hpp"

namespace tsms::io {

// <document>(<timeseries><date/><value/></timeseries>)* rows; the value is
// NaN for ?. Throws ParseError with the offending line.
std::vector<std::pair<std::string, double>> read_series_xml_file(const std::string& path);
std::vector<std::pair<std::string, double>> read_series_xml(const std::string& text);

// ! cells are omitted, ? cells encode as NaN.
std::string series_to_xml(const TimeSeries& s);
void write_series_xml_file(const std::string& path, const TimeSeries& s);

// Align rows to a calendar: dates missing from the rows become !, NaN
// values become ?. Every row date must exist in the calendar.
TimeSeries series_from_rows(const std::string& name,
                            const std::vector<std::pair<std::string, double>>& rows,
                            CalendarPtr calendar);

// Build a calendar from the row dates themselves (all cells present).
CalendarPtr calendar_from_rows(const std::vector<std::pair<std::string, double>>& rows,
                               TimeUnit unit);

// Plain text, one ISO-8601 label per line.
CalendarPtr read_calendar_file(const std::string& path, TimeUnit unit);
void write_calendar_file(const std::string& path, const Calendar& calendar);

// Trip CSV: header road_id,lat,lon,legal_speed,speed,accel,fuel; one row
// per sample at a fixed period. Empty cells become ?.
Trip read_trip_csv_file(const std::string& path, double dt, SpeedUnit unit);
Trip read_trip_csv(const std::string& text, double dt, SpeedUnit unit);

// Flat-file engine store: <dir>/calendar.txt plus one XML file per series.
class Store {
public:
    explicit Store(std::string dir);

    const std::string& dir() const { return dir_; }
    bool has_calendar() const;
    CalendarPtr calendar() const;
    void set_calendar(const CalendarPtr& calendar);

    void save_series(const TimeSeries& s);
    TimeSeries load_series(const std::string& name) const;
    bool has_series(const std::string& name) const;
    std::vector<std::string> list_series() const;

private:
    std::string series_path(const std::string& name) const;
    std::string dir_;
};

} // namespace tsms::io
