//! Discrete, bounded time axis: points, closed periods, coalesced temporal
//! sets and the mapping between axis points and calendar timestamps.

use std::fmt;

use chrono::{Datelike, Duration, NaiveDate};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    #[error("reversed period bounds: {start} > {end}")]
    ReversedPeriod { start: u32, end: u32 },
    #[error("point {point} lies outside the axis [0, {horizon}]")]
    OffAxis { point: u32, horizon: u32 },
    #[error("`{0}` lies outside the time axis")]
    OutsideAxis(String),
    #[error("granularity mismatch: {0}")]
    Granularity(String),
    #[error("malformed time expression `{0}`")]
    Syntax(String),
    #[error("invalid axis: {0}")]
    InvalidAxis(String),
}

pub type Result<T> = std::result::Result<T, TimeError>;

/// A position on the axis, counted in granules from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimePoint(pub u32);

impl TimePoint {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Closed, nonempty interval `[start, end]` of axis points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Period {
    start: TimePoint,
    end: TimePoint,
}

impl Period {
    /// Builds `[start, end]` without an axis check.
    pub fn new(start: u32, end: u32) -> Result<Period> {
        if start > end {
            return Err(TimeError::ReversedPeriod { start, end });
        }
        Ok(Period {
            start: TimePoint(start),
            end: TimePoint(end),
        })
    }

    pub fn point(t: u32) -> Period {
        Period {
            start: TimePoint(t),
            end: TimePoint(t),
        }
    }

    pub fn start(&self) -> u32 {
        self.start.0
    }

    pub fn end(&self) -> u32 {
        self.end.0
    }

    /// Number of points covered.
    pub fn duration(&self) -> u32 {
        self.end.0 - self.start.0 + 1
    }

    pub fn contains_period(&self, other: &Period) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn contains_point(&self, t: u32) -> bool {
        self.start.0 <= t && t <= self.end.0
    }

    pub fn intersect(&self, other: &Period) -> Option<Period> {
        let s = self.start.max(other.start);
        let e = self.end.min(other.end);
        (s <= e).then_some(Period { start: s, end: e })
    }

    pub fn points(&self) -> impl Iterator<Item = u32> {
        self.start.0..=self.end.0
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start.0, self.end.0)
    }
}

/// Checked construction of `[start, end]` on `axis`.
pub fn make_period(start: TimePoint, end: TimePoint, axis: &Axis) -> Result<Period> {
    axis.check_point(start.0)?;
    axis.check_point(end.0)?;
    Period::new(start.0, end.0)
}

/// Canonical maximal-period decomposition of a point set: sorted, disjoint
/// and separated by at least one missing point.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TemporalSet {
    periods: Vec<Period>,
}

impl TemporalSet {
    pub fn empty() -> TemporalSet {
        TemporalSet::default()
    }

    pub fn from_period(p: Period) -> TemporalSet {
        TemporalSet { periods: vec![p] }
    }

    pub fn periods(&self) -> &[Period] {
        &self.periods
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn contains(&self, p: &Period) -> bool {
        contains(self, p)
    }

    pub fn contains_point(&self, t: u32) -> bool {
        self.periods
            .binary_search_by(|q| {
                if q.end() < t {
                    std::cmp::Ordering::Less
                } else if q.start() > t {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    pub fn union(&self, other: &TemporalSet) -> TemporalSet {
        let mut all = self.periods.clone();
        all.extend_from_slice(&other.periods);
        normalize(all)
    }

    pub fn intersect_period(&self, window: &Period) -> TemporalSet {
        TemporalSet {
            periods: self
                .periods
                .iter()
                .filter_map(|p| p.intersect(window))
                .collect(),
        }
    }

    /// True when `p` is exactly one of the maximal periods.
    pub fn is_maximal(&self, p: &Period) -> bool {
        self.periods.binary_search(p).is_ok()
    }
}

impl fmt::Display for TemporalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.periods.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Coalesces overlapping and adjacent periods.
pub fn normalize(mut periods: Vec<Period>) -> TemporalSet {
    periods.sort();
    let mut out: Vec<Period> = Vec::with_capacity(periods.len());
    for p in periods {
        match out.last_mut() {
            Some(last) if p.start() <= last.end().saturating_add(1) => {
                if p.end > last.end {
                    last.end = p.end;
                }
            }
            _ => out.push(p),
        }
    }
    TemporalSet { periods: out }
}

/// Subperiod test: every point of `p` lies in `ts`.
pub fn contains(ts: &TemporalSet, p: &Period) -> bool {
    // In canonical form the only candidate is the last period starting at or before p.
    let idx = ts.periods.partition_point(|q| q.start <= p.start);
    idx > 0 && ts.periods[idx - 1].contains_period(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Granularity {
    Day,
    Hour,
    Minute,
}

impl Granularity {
    pub fn per_day(self) -> u32 {
        match self {
            Granularity::Day => 1,
            Granularity::Hour => 24,
            Granularity::Minute => 1440,
        }
    }

    pub fn parse(s: &str) -> Option<Granularity> {
        match s {
            "day" => Some(Granularity::Day),
            "hour" => Some(Granularity::Hour),
            "minute" => Some(Granularity::Minute),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Granularity::Day => "day",
            Granularity::Hour => "hour",
            Granularity::Minute => "minute",
        }
    }
}

/// A bounded, discrete time axis anchored at midnight of `origin`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    origin: NaiveDate,
    granularity: Granularity,
    horizon: u32,
}

impl Axis {
    pub fn new(origin: NaiveDate, granularity: Granularity, horizon: u32) -> Result<Axis> {
        if horizon < 1 {
            return Err(TimeError::InvalidAxis("horizon must be at least 1".into()));
        }
        Ok(Axis {
            origin,
            granularity,
            horizon,
        })
    }

    /// Axis covering whole days from `first` to `last` inclusive.
    pub fn spanning(first: NaiveDate, last: NaiveDate, granularity: Granularity) -> Result<Axis> {
        let days = (last - first).num_days();
        if days < 0 {
            return Err(TimeError::InvalidAxis(format!(
                "last day {} precedes first day {}",
                fmt_date(last),
                fmt_date(first)
            )));
        }
        let points = (days as u64 + 1) * granularity.per_day() as u64;
        let horizon = u32::try_from(points - 1)
            .map_err(|_| TimeError::InvalidAxis("axis too long".into()))?;
        Axis::new(first, granularity, horizon)
    }

    pub fn origin(&self) -> NaiveDate {
        self.origin
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn full(&self) -> Period {
        Period {
            start: TimePoint(0),
            end: TimePoint(self.horizon),
        }
    }

    pub fn check_point(&self, t: u32) -> Result<TimePoint> {
        if t > self.horizon {
            return Err(TimeError::OffAxis {
                point: t,
                horizon: self.horizon,
            });
        }
        Ok(TimePoint(t))
    }

    pub fn check_period(&self, p: &Period) -> Result<()> {
        self.check_point(p.end()).map(|_| ())
    }

    fn day_index(&self, date: NaiveDate) -> Option<i64> {
        let d = (date - self.origin).num_days();
        let days = (self.horizon as i64 + 1) / self.granularity.per_day() as i64;
        let partial = (self.horizon as i64 + 1) % self.granularity.per_day() as i64 != 0;
        (d >= 0 && (d < days || (partial && d == days))).then_some(d)
    }

    /// Granule period covering the whole calendar day, clipped to the axis.
    pub fn day_period(&self, date: NaiveDate) -> Result<Period> {
        let d = self
            .day_index(date)
            .ok_or_else(|| TimeError::OutsideAxis(fmt_date(date)))?;
        let per = self.granularity.per_day() as i64;
        let start = (d * per) as u32;
        let end = ((d + 1) * per - 1).min(self.horizon as i64) as u32;
        Ok(Period::new(start, end).expect("day period is ordered"))
    }

    /// Point for a date and clock time.
    pub fn point_at(&self, date: NaiveDate, hour: u32, minute: u32) -> Result<TimePoint> {
        let within = match self.granularity {
            Granularity::Day => {
                if hour != 0 || minute != 0 {
                    return Err(TimeError::Granularity(
                        "time of day on a day-granularity axis".into(),
                    ));
                }
                0
            }
            Granularity::Hour => {
                if minute != 0 {
                    return Err(TimeError::Granularity(format!(
                        "{hour:02}:{minute:02} is not an hour boundary"
                    )));
                }
                hour
            }
            Granularity::Minute => hour * 60 + minute,
        };
        let day = self.day_period(date)?;
        let t = day.start() + within;
        self.check_point(t)
            .map_err(|_| TimeError::OutsideAxis(format!("{} {hour:02}:{minute:02}", fmt_date(date))))
    }

    /// Calendar position of an axis point: date, hour, minute.
    pub fn calendar(&self, t: u32) -> (NaiveDate, u32, u32) {
        let per = self.granularity.per_day();
        let date = self.origin + Duration::days((t / per) as i64);
        let within = t % per;
        match self.granularity {
            Granularity::Day => (date, 0, 0),
            Granularity::Hour => (date, within, 0),
            Granularity::Minute => (date, within / 60, within % 60),
        }
    }

    fn render_point(&self, t: u32) -> String {
        let (date, h, m) = self.calendar(t);
        match self.granularity {
            Granularity::Day => fmt_date(date),
            Granularity::Hour => format!("{} {h:02}:00", fmt_date(date)),
            Granularity::Minute => format!("{} {h:02}:{m:02}", fmt_date(date)),
        }
    }

    /// Parses a timestamp bound: `D/M/YYYY`, `D/M/YYYY HH:MM` or
    /// `D/M/YYYY@HH:MM`. A bare date resolves to its first granule for
    /// `Bound::Start` and its last granule for `Bound::End`.
    pub fn parse_timestamp(&self, text: &str, bound: Bound) -> Result<TimePoint> {
        let text = text.trim();
        let (date_part, time_part) = match text.split_once(['@', ' ']) {
            Some((d, t)) => (d, Some(t.trim())),
            None => (text, None),
        };
        let date = match parse_date_expr(date_part)? {
            DateExpr::Date(d) => d.to_naive()?,
            DateExpr::Time(_) => return Err(TimeError::Syntax(text.to_string())),
        };
        match time_part {
            Some(t) => match parse_date_expr(t)? {
                DateExpr::Time(ClockTime { hour, minute }) => self.point_at(date, hour, minute),
                DateExpr::Date(_) => Err(TimeError::Syntax(text.to_string())),
            },
            None => {
                let day = self.day_period(date)?;
                Ok(match bound {
                    Bound::Start => day.start,
                    Bound::End => day.end,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Start,
    End,
}

pub fn fmt_date(d: NaiveDate) -> String {
    format!("{}/{}/{}", d.day(), d.month(), d.year())
}

/// `D/M/YYYY..D/M/YYYY`, with `HH:MM` appended to each side on sub-day axes.
pub fn render_period(p: &Period, axis: &Axis) -> String {
    format!("{}..{}", axis.render_point(p.start()), axis.render_point(p.end()))
}

/// Calendar day written day-first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CalendarDate {
    pub day: u32,
    pub month: u32,
    pub year: i32,
}

impl CalendarDate {
    pub fn to_naive(self) -> Result<NaiveDate> {
        NaiveDate::from_ymd_opt(self.year, self.month, self.day).ok_or_else(|| {
            TimeError::Syntax(format!("{}/{}/{}", self.day, self.month, self.year))
        })
    }
}

/// 24-hour clock time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClockTime {
    pub hour: u32,
    pub minute: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DateExpr {
    Date(CalendarDate),
    Time(ClockTime),
}

/// Parses `d/m/yy`, `d/m/yyyy`, `h:mm`, `h:mmam` or `h:mmpm`.
pub fn parse_date_expr(text: &str) -> Result<DateExpr> {
    let bad = || TimeError::Syntax(text.to_string());
    let lower = text.trim().to_ascii_lowercase();
    if lower.contains('/') {
        let parts: Vec<&str> = lower.split('/').collect();
        if parts.len() != 3 || parts.iter().any(|p| p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit())) {
            return Err(bad());
        }
        let day: u32 = parts[0].parse().map_err(|_| bad())?;
        let month: u32 = parts[1].parse().map_err(|_| bad())?;
        let year: i32 = match parts[2].len() {
            2 => {
                let yy: i32 = parts[2].parse().map_err(|_| bad())?;
                if yy >= 50 {
                    1900 + yy
                } else {
                    2000 + yy
                }
            }
            4 => parts[2].parse().map_err(|_| bad())?,
            _ => return Err(bad()),
        };
        let date = CalendarDate { day, month, year };
        date.to_naive()?;
        return Ok(DateExpr::Date(date));
    }
    let (clock, meridiem) = if let Some(c) = lower.strip_suffix("am") {
        (c, Some(false))
    } else if let Some(c) = lower.strip_suffix("pm") {
        (c, Some(true))
    } else {
        (lower.as_str(), None)
    };
    let (h, m) = clock.split_once(':').ok_or_else(bad)?;
    if h.is_empty() || m.len() != 2 || !h.bytes().chain(m.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut hour: u32 = h.parse().map_err(|_| bad())?;
    let minute: u32 = m.parse().map_err(|_| bad())?;
    if minute > 59 {
        return Err(bad());
    }
    match meridiem {
        Some(pm) => {
            if !(1..=12).contains(&hour) {
                return Err(bad());
            }
            hour = match (hour, pm) {
                (12, false) => 0,
                (12, true) => 12,
                (h, false) => h,
                (h, true) => h + 12,
            };
        }
        None if hour > 23 => return Err(bad()),
        None => {}
    }
    Ok(DateExpr::Time(ClockTime { hour, minute }))
}

/// Resolves a date to its day period, or a clock time to the granule at
/// that time of day on every day of the axis.
pub fn calendar_resolve(expr: &DateExpr, axis: &Axis) -> Result<Vec<Period>> {
    match expr {
        DateExpr::Date(d) => Ok(vec![axis.day_period(d.to_naive()?)?]),
        DateExpr::Time(ClockTime { hour, minute }) => {
            if axis.granularity == Granularity::Day {
                return Err(TimeError::Granularity(
                    "time of day on a day-granularity axis".into(),
                ));
            }
            let per = axis.granularity.per_day();
            let within = match axis.granularity {
                Granularity::Hour if *minute != 0 => {
                    return Err(TimeError::Granularity(format!(
                        "{hour:02}:{minute:02} is not an hour boundary"
                    )))
                }
                Granularity::Hour => *hour,
                _ => hour * 60 + minute,
            };
            let out: Vec<Period> = (0..)
                .map(|d: u32| d * per + within)
                .take_while(|t| *t <= axis.horizon)
                .map(Period::point)
                .collect();
            if out.is_empty() {
                return Err(TimeError::OutsideAxis(format!("{hour:02}:{minute:02}")));
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnitName {
    Minute,
    Hour,
    Day,
    Week,
    Month,
    Year,
}

impl UnitName {
    pub fn parse(s: &str) -> Option<UnitName> {
        Some(match s.trim_end_matches('s') {
            "minute" => UnitName::Minute,
            "hour" => UnitName::Hour,
            "day" => UnitName::Day,
            "week" => UnitName::Week,
            "month" => UnitName::Month,
            "year" => UnitName::Year,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UnitName::Minute => "minute",
            UnitName::Hour => "hour",
            UnitName::Day => "day",
            UnitName::Week => "week",
            UnitName::Month => "month",
            UnitName::Year => "year",
        }
    }
}

impl fmt::Display for UnitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A duration unit resolved against an axis granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DurationUnit {
    pub name: UnitName,
    pub points: u32,
}

impl DurationUnit {
    /// Months count 30 days and years 365 days.
    pub fn resolve(name: UnitName, granularity: Granularity) -> Result<DurationUnit> {
        let per_day = granularity.per_day();
        let points = match (name, granularity) {
            (UnitName::Minute, Granularity::Minute) => 1,
            (UnitName::Minute, g) => {
                return Err(TimeError::Granularity(format!(
                    "minute is finer than the {} axis",
                    g.name()
                )))
            }
            (UnitName::Hour, Granularity::Day) => {
                return Err(TimeError::Granularity(
                    "hour is finer than the day axis".into(),
                ))
            }
            (UnitName::Hour, _) => per_day / 24,
            (UnitName::Day, _) => per_day,
            (UnitName::Week, _) => 7 * per_day,
            (UnitName::Month, _) => 30 * per_day,
            (UnitName::Year, _) => 365 * per_day,
        };
        Ok(DurationUnit { name, points })
    }
}

pub fn duration_points(unit: DurationUnit, n: u32) -> u32 {
    unit.points * n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn p(s: u32, e: u32) -> Period {
        Period::new(s, e).unwrap()
    }

    fn day_axis() -> Axis {
        Axis::spanning(ymd(1994, 1, 1), ymd(1995, 12, 31), Granularity::Day).unwrap()
    }

    #[test]
    fn period_construction() {
        assert_eq!(p(3, 7).duration(), 5);
        assert_eq!(p(5, 5).duration(), 1);
        let err = Period::new(7, 3).unwrap_err();
        assert_eq!(err, TimeError::ReversedPeriod { start: 7, end: 3 });
        assert!(err.to_string().contains("reversed period bounds"));
        let axis = Axis::new(ymd(1994, 1, 1), Granularity::Day, 10).unwrap();
        assert!(matches!(
            make_period(TimePoint(3), TimePoint(11), &axis),
            Err(TimeError::OffAxis { point: 11, .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(vec![p(1, 3), p(4, 6)]).periods(), &[p(1, 6)]);
        assert_eq!(normalize(vec![p(1, 3), p(5, 6)]).periods(), &[p(1, 3), p(5, 6)]);
        assert!(normalize(vec![]).is_empty());
        assert_eq!(normalize(vec![p(4, 9), p(1, 5), p(2, 3)]).periods(), &[p(1, 9)]);
    }

    #[test]
    fn contains_examples() {
        let ts = TemporalSet::from_period(p(5, 20));
        assert!(contains(&ts, &p(7, 9)));
        assert!(!contains(&ts, &p(19, 22)));
        let gap = normalize(vec![p(1, 3), p(5, 6)]);
        assert!(!contains(&gap, &p(3, 5)));
        assert!(contains(&gap, &p(5, 6)));
        assert!(!contains(&TemporalSet::empty(), &p(0, 0)));
    }

    #[test]
    fn resolves_dates_day_first() {
        let axis = day_axis();
        let june = parse_date_expr("1/6/94").unwrap();
        assert_eq!(calendar_resolve(&june, &axis).unwrap(), vec![p(151, 151)]);
        let jan = parse_date_expr("1/1/94").unwrap();
        assert_eq!(calendar_resolve(&jan, &axis).unwrap(), vec![p(0, 0)]);
        let early = parse_date_expr("31/12/93").unwrap();
        assert!(matches!(
            calendar_resolve(&early, &axis),
            Err(TimeError::OutsideAxis(_))
        ));
        // 1996 is a leap year; 1/3/96 is day 31 + 29 = 60 from 1/1/96
        let leap = Axis::spanning(ymd(1996, 1, 1), ymd(1996, 12, 31), Granularity::Day).unwrap();
        let march = parse_date_expr("1/3/1996").unwrap();
        assert_eq!(calendar_resolve(&march, &leap).unwrap(), vec![p(60, 60)]);
    }

    #[test]
    fn two_digit_year_pivot() {
        let d = |s| match parse_date_expr(s).unwrap() {
            DateExpr::Date(d) => d.year,
            _ => unreachable!(),
        };
        assert_eq!(d("1/1/85"), 1985);
        assert_eq!(d("1/1/50"), 1950);
        assert_eq!(d("1/1/49"), 2049);
        assert_eq!(d("1/1/2001"), 2001);
    }

    #[test]
    fn resolves_clock_times_per_day() {
        let axis = Axis::spanning(ymd(1994, 1, 1), ymd(1994, 1, 2), Granularity::Minute).unwrap();
        assert_eq!(axis.horizon(), 2879);
        let five = parse_date_expr("5:00pm").unwrap();
        assert_eq!(five, parse_date_expr("17:00").unwrap());
        assert_eq!(
            calendar_resolve(&five, &axis).unwrap(),
            vec![p(1020, 1020), p(2460, 2460)]
        );
        assert!(matches!(
            calendar_resolve(&five, &day_axis()),
            Err(TimeError::Granularity(_))
        ));
        let hours = Axis::spanning(ymd(1994, 1, 1), ymd(1994, 1, 2), Granularity::Hour).unwrap();
        assert_eq!(calendar_resolve(&five, &hours).unwrap(), vec![p(17, 17), p(41, 41)]);
        let half = parse_date_expr("5:30pm").unwrap();
        assert!(calendar_resolve(&half, &hours).is_err());
    }

    #[test]
    fn meridiem_edges() {
        let t = |s| parse_date_expr(s).unwrap();
        assert_eq!(t("12:00am"), DateExpr::Time(ClockTime { hour: 0, minute: 0 }));
        assert_eq!(t("12:15pm"), DateExpr::Time(ClockTime { hour: 12, minute: 15 }));
        assert!(parse_date_expr("13:00pm").is_err());
        assert!(parse_date_expr("25:00").is_err());
        assert!(parse_date_expr("1/13/94").is_err());
        assert!(parse_date_expr("1/6").is_err());
    }

    #[test]
    fn duration_units() {
        let day = |n| DurationUnit::resolve(n, Granularity::Day);
        assert_eq!(duration_points(day(UnitName::Day).unwrap(), 2), 2);
        assert_eq!(duration_points(day(UnitName::Week).unwrap(), 1), 7);
        assert_eq!(duration_points(day(UnitName::Year).unwrap(), 2), 730);
        assert_eq!(duration_points(day(UnitName::Month).unwrap(), 1), 30);
        assert!(day(UnitName::Minute).is_err());
        assert!(day(UnitName::Hour).is_err());
        let hour = DurationUnit::resolve(UnitName::Hour, Granularity::Minute).unwrap();
        assert_eq!(duration_points(hour, 2), 120);
    }

    #[test]
    fn renders_periods() {
        let axis = day_axis();
        assert_eq!(render_period(&p(0, 0), &axis), "1/1/1994..1/1/1994");
        assert_eq!(render_period(&p(151, 151), &axis), "1/6/1994..1/6/1994");
        assert_eq!(render_period(&p(0, 30), &axis), "1/1/1994..31/1/1994");
        let mins = Axis::spanning(ymd(1994, 1, 1), ymd(1994, 1, 2), Granularity::Minute).unwrap();
        assert_eq!(
            render_period(&p(1020, 1500), &mins),
            "1/1/1994 17:00..2/1/1994 01:00"
        );
        let hours = Axis::spanning(ymd(1994, 1, 1), ymd(1994, 1, 2), Granularity::Hour).unwrap();
        assert_eq!(render_period(&p(17, 25), &hours), "1/1/1994 17:00..2/1/1994 01:00");
    }

    #[test]
    fn timestamps_and_bounds() {
        let mins = Axis::spanning(ymd(1994, 1, 1), ymd(1994, 1, 2), Granularity::Minute).unwrap();
        assert_eq!(mins.parse_timestamp("2/1/1994", Bound::Start).unwrap(), TimePoint(1440));
        assert_eq!(mins.parse_timestamp("2/1/1994", Bound::End).unwrap(), TimePoint(2879));
        assert_eq!(mins.parse_timestamp("1/1/1994 17:00", Bound::End).unwrap(), TimePoint(1020));
        assert_eq!(mins.parse_timestamp("1/1/1994@5:00pm", Bound::Start).unwrap(), TimePoint(1020));
        assert!(mins.parse_timestamp("3/1/1994", Bound::Start).is_err());
        assert!(day_axis().parse_timestamp("1/1/1994 10:00", Bound::Start).is_err());
    }
}
