#![no_main]

use libfuzzer_sys::fuzz_target;
use staircase::election::BallotProfile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(profile) = BallotProfile::from_json(text) else { return };
    // Accepted profiles must survive a canonical round trip unchanged.
    let again = BallotProfile::from_json(&profile.to_json()).expect("canonical output reparses");
    assert_eq!(again.to_json(), profile.to_json());
    assert!(profile.total_weight() > 0.0);
});
