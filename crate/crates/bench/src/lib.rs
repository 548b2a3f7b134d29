//! Shared fixtures for the benchmarks: the building program scaled to any
//! number of rooms.

use std::fmt::Write as _;

use pantagruel_core::{ExternalChange, Value};

const INTERFACES: &str = "\
interface MotionDetector { attribute room : Integer event detected : Boolean }
interface Light { attribute room : Integer action switch( Boolean ) }
interface Fan { attribute room : Integer action setSpeed( Integer ) }
interface TemperatureSensor { event temperature : Integer }
";

const RULES: &str = "\
rules
(1) when event detected from m:MotionDetector value = true
    trigger action switch(true) on l:Light with room = m.room end
(2) when event detected from m:MotionDetector value = false
    trigger action switch(false) on l:Light with room = m.room end
(3) when event switch from l:Light value = true and event temperature from thermo value = 30
    trigger action setSpeed(10) on f:Fan with room = l.room end
end
";

/// Program text with one detector, two lights and a fan per room.
pub fn building(rooms: usize) -> String {
    let mut text = String::from(INTERFACES);
    for r in 0..rooms {
        let _ = writeln!(text, "m{r}:MotionDetector {{ room : {r} }}");
        let _ = writeln!(text, "la{r}:Light {{ room : {r} }}");
        let _ = writeln!(text, "lb{r}:Light {{ room : {r} }}");
        let _ = writeln!(text, "fan{r}:Fan {{ room : {r} }}");
    }
    text.push_str("thermo:TemperatureSensor{}\n");
    text.push_str(RULES);
    text
}

/// Every detector toggles each tick, half the rooms out of phase.
pub fn motion_script(rooms: usize, ticks: usize) -> Vec<Vec<ExternalChange>> {
    (0..ticks)
        .map(|t| {
            let mut changes: Vec<ExternalChange> = (0..rooms)
                .map(|r| ExternalChange::event(&format!("m{r}"), "detected", Value::Tr((t + r) % 2 == 0)))
                .collect();
            changes.push(ExternalChange::event("thermo", "temperature", Value::Nat(30)));
            changes
        })
        .collect()
}
