mod common;

use common::blur::complementary_pair;
use qhosvd::fusion::{fuse, FusionConfig};
use qhosvd::metrics::psnr;
use qhosvd::{read_image, RgbImage};

fn fixture() -> RgbImage {
    read_image(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/astronaut_256.png")).unwrap()
}

#[test]
fn identical_sources_reproduce_the_image() {
    let img = fixture();
    let out = fuse(&[img.clone(), img.clone()], &FusionConfig::default()).unwrap();
    assert!(out.max_abs_diff(&img).unwrap() <= 1e-10);
}

#[test]
fn complementary_blur_pair_fuses_above_both_sources() {
    let truth = fixture();
    let (a, b) = complementary_pair(&truth, 3.0);
    let fused = fuse(&[a.clone(), b.clone()], &FusionConfig::default()).unwrap();
    let (pa, pb, pf) = (psnr(&truth, &a).unwrap(), psnr(&truth, &b).unwrap(), psnr(&truth, &fused).unwrap());
    println!("sources {pa:.2} / {pb:.2} dB, fused {pf:.2} dB");
    assert!(pf >= pa.max(pb) + 2.0);
}

#[test]
fn source_order_does_not_change_the_result() {
    let truth = fixture();
    let (a, b) = complementary_pair(&truth, 3.0);
    let cfg = FusionConfig::default();
    let ab = fuse(&[a.clone(), b.clone()], &cfg).unwrap();
    let ba = fuse(&[b, a], &cfg).unwrap();
    assert!(ab.max_abs_diff(&ba).unwrap() <= 1e-9);
}
