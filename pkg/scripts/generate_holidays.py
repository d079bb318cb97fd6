"""Regenerate the bundled holiday files from the calendar rules."""

from pathlib import Path

from multicurve.calendar_time import CalendarId, write_holiday_file

OUT = Path(__file__).resolve().parents[1] / "src" / "multicurve" / "data" / "holidays"

if __name__ == "__main__":
    for cal in (CalendarId.MX, CalendarId.US, CalendarId.UK, CalendarId.TARGET):
        write_holiday_file(cal, OUT / f"{cal.value}.txt")
        print("wrote", OUT / f"{cal.value}.txt")
