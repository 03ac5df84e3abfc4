//! Decoding a permutation of examinations into tours.

use crate::error::{Error, Result};
use crate::model::{BasicTour, Instance, Minutes, PlannedTour};

use super::{Chromosome, ExamIndex};

/// Cuts the examination sequence into consecutive tours, closing the current
/// tour as soon as the next examination would push it past the working day.
/// Consecutive examinations in the same township share one stop.
///
/// For a fixed permutation no other cut into consecutive tours uses fewer
/// tours.
pub fn greedy_split(c: &Chromosome, idx: &ExamIndex, instance: &Instance) -> Result<Vec<PlannedTour>> {
    let p = instance.params();
    let ex = p.exam_duration;
    let mut tours = Vec::new();
    let mut stops: Vec<usize> = Vec::new();
    let mut exams: Vec<u32> = Vec::new();
    let mut current: Minutes = 0;

    for &id in c.perm() {
        let u = idx.township(id);
        let single = instance.dist(0, u) + ex + instance.dist(u, 0);
        if single > p.max_day {
            return Err(Error::InfeasibleInstance(vec![u]));
        }
        let extended = match stops.last() {
            None => single,
            Some(&v) if v == u => current + ex,
            Some(&v) => current + instance.dist(v, u) + ex + instance.dist(u, 0) - instance.dist(v, 0),
        };
        if stops.is_empty() || extended <= p.max_day {
            if stops.last() == Some(&u) {
                *exams.last_mut().expect("stop has a count") += 1;
            } else {
                stops.push(u);
                exams.push(1);
            }
            current = extended;
        } else {
            tours.push(close(&mut stops, &mut exams)?);
            stops.push(u);
            exams.push(1);
            current = single;
        }
    }
    if !stops.is_empty() {
        tours.push(close(&mut stops, &mut exams)?);
    }
    Ok(tours)
}

fn close(stops: &mut Vec<usize>, exams: &mut Vec<u32>) -> Result<PlannedTour> {
    PlannedTour::new(
        BasicTour::route(std::mem::take(stops))?,
        std::mem::take(exams),
    )
}
