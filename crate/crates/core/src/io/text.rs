use std::fmt::Write;

use crate::model::{Instance, Schedule};

/// Plain-text monthly plan.
///
/// ```text
/// Schedule: {tours} tours, {vans} vans, {days} working days
/// Day {d}: {k} tours
/// Day {d} Van {v} Tour {id}: drive={min} exam={min} total={min}
///   {township}: {count} examinations
/// ```
///
/// Every day is listed, including empty ones. Within a day tours are ordered
/// by van, tour ids are 1-based positions in the schedule. Tours whose stops
/// are not townships of `instance` are skipped.
pub fn write_schedule_text(s: &Schedule, instance: &Instance) -> String {
    let p = instance.params();
    let mut out = String::new();
    let vans = s.van_of.iter().copied().max().unwrap_or(0);
    let _ = writeln!(
        out,
        "Schedule: {} tours, {} vans, {} working days",
        s.len(),
        vans,
        p.working_days
    );
    let mut by_day: Vec<Vec<(u32, usize)>> = vec![Vec::new(); p.working_days as usize];
    for (k, (&day, &van)) in s.day_of.iter().zip(&s.van_of).enumerate() {
        if let Some(slot) = (day as usize).checked_sub(1).and_then(|d| by_day.get_mut(d)) {
            slot.push((van, k));
        }
    }
    for (d, mut tours) in by_day.into_iter().enumerate() {
        tours.sort_unstable();
        let _ = writeln!(out, "Day {}: {} tours", d + 1, tours.len());
        for (van, k) in tours {
            let pt = &s.tours[k];
            if !pt.stops().iter().all(|&t| instance.is_township(t)) {
                continue;
            }
            let drive = instance.route_travel(pt.stops());
            let exam = p.exam_duration * pt.total_exams();
            let _ = writeln!(
                out,
                "Day {} Van {} Tour {}: drive={} exam={} total={}",
                d + 1,
                van,
                k + 1,
                drive,
                exam,
                drive + exam
            );
            for (&stop, &count) in pt.stops().iter().zip(&pt.exams) {
                let _ = writeln!(out, "  {}: {} examinations", instance.name(stop), count);
            }
        }
    }
    out
}
