use std::path::Path;

use proptest::prelude::*;
use replaymod::formats::{parse_response_csv, render_response_csv, ModelFile, SpeakerFile};
use replaymod_core::SvmModel;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, -1e-6f64..1e-6, Just(0.0)]
}

proptest! {
    #[test]
    fn response_csv_round_trips(rows in prop::collection::vec((0.0f64..48_000.0, 0.0f64..10.0), 0..80)) {
        let text = render_response_csv(&rows);
        prop_assert!(text.starts_with("freq_hz,gain\n"));
        prop_assert_eq!(parse_response_csv(&text, Path::new("r.csv")).unwrap(), rows);
    }

    #[test]
    fn model_file_round_trips(
        r in 1usize..30,
        vals in prop::collection::vec(finite(), 90),
        bias in finite(),
        trained_on in any::<u64>(),
        acc in 0.0f64..=1.0,
        threshold in prop::option::of(0.0f64..=1.0),
    ) {
        let model = SvmModel {
            weights: vals[..r].to_vec(),
            bias,
            feature_mean: vals[30..30 + r].to_vec(),
            feature_scale: vals[60..60 + r].iter().map(|v| v.abs() + 1e-3).collect(),
            trained_on,
            training_accuracy: acc,
        };
        let file = ModelFile { model, auc_threshold: threshold };
        let back = ModelFile::parse(&file.render(), Path::new("m.txt")).unwrap();
        prop_assert_eq!(back, file);
    }

    #[test]
    fn speaker_file_round_trips(seed in any::<u64>(), k in 3u32..8) {
        let n = 1usize << k;
        let profile = replaymod_core::SpeakerModel::phone(seed).profile(8_000, n).unwrap();
        let file = SpeakerFile::from_profile(&profile);
        let back = SpeakerFile::parse(&file.render(), Path::new("s.txt")).unwrap();
        prop_assert_eq!(back.to_profile().unwrap(), profile);
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    let p = Path::new("x");
    assert!(parse_response_csv("freq_hz,gain\n100,abc\n", p).is_err());
    assert!(parse_response_csv("hz,gain\n100,1\n", p).is_err());
    assert!(ModelFile::parse("not a model\n", p).is_err());
    assert!(ModelFile::parse("dualguard-svm v1\nrmax 1\nwat 3\n", p).is_err());
    assert!(SpeakerFile::parse("100 1\n", p).is_err());
}
