// Global time: granules, floor timestamps and the SOF grid.

use tt_cosim::time::{ClockSpec, FrameSchedule, Interval, Seconds, Timestamp};

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let clock = ClockSpec::new(Seconds::new(1, 100), None)?.with_epoch("00:00:00");

    // An event at 3.999 s lies in the granule that starts at tick 399.
    let t = clock.timestamp_of(Seconds::new(3999, 1000))?;
    assert_eq!(t, Timestamp::new(399));
    println!("3.999 s -> tick {t} ({})", clock.label(t));

    let horizon = Interval::new(Timestamp::new(0), Timestamp::new(500))?;
    let schedule = FrameSchedule::new(100, Timestamp::new(0), horizon)?;
    let sofs: Vec<u64> = schedule.sofs().map(Timestamp::ticks).collect();
    println!("SOFs in {horizon}: {sofs:?}");
    assert_eq!(sofs, [0, 100, 200, 300, 400]);

    for probe in [0, 99, 100, 250] {
        let next = schedule.next_sof(Timestamp::new(probe))?;
        println!("next SOF after {probe}: {next}");
        assert!(next > Timestamp::new(probe));
    }
    Ok(())
}
