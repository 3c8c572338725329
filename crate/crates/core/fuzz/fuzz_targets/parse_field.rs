//! Field files: header parsing, encoding detection and both decoders.
//!
//! ```not_rust
//! cargo +nightly fuzz run parse_field
//! ```

#![no_main]

use libfuzzer_sys::fuzz_target;
use torus_elliptic::spectral::io::{decode, detect_encoding, encode, parse_header, Encoding};

fuzz_target!(|data: &[u8]| {
    let _ = parse_header(data);
    let Ok(encoding) = detect_encoding(data) else {
        return;
    };
    let _ = decode(data, Encoding::Csv);
    let _ = decode(data, Encoding::Binary);
    if let Ok(field) = decode(data, encoding) {
        // Whatever decodes must survive a lossless round trip.
        for target in [Encoding::Csv, Encoding::Binary] {
            let bytes = encode(&field, target);
            assert_eq!(detect_encoding(&bytes).unwrap(), target);
            let again = decode(&bytes, target).unwrap();
            assert_eq!(again.values(), field.values());
        }
    }
});
