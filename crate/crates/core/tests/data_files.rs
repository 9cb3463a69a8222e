use swapopt::device::{device_speedups, DeviceModel};
use swapopt::noise::{calibrate_depol_2q, NoiseModel};

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn devices_load_and_validate() {
    for (file, qubits, edges) in [("casablanca-sim.json", 7, 6), ("line6.json", 6, 5), ("tee4.json", 4, 3)] {
        let d = DeviceModel::load(data(file)).unwrap();
        assert_eq!((d.n_wires(), d.edges.len()), (qubits, edges), "{file}");
        let back = DeviceModel::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
    }
}

#[test]
fn casablanca_speedups() {
    let d = DeviceModel::load(data("casablanca-sim.json")).unwrap();
    let (rows, mean) = device_speedups(&d).unwrap();
    let fastest = rows.iter().find(|r| (r.control, r.target) == (5, 6)).unwrap();
    assert!((fastest.optimized_speedup - 1.121).abs() < 1e-3);
    assert!(rows.iter().all(|r| r.optimized_speedup > r.orientation_speedup && r.orientation_speedup > 1.0));
    assert!(mean > 1.05 && mean < fastest.optimized_speedup);
}

#[test]
fn shipped_noise_is_the_calibrated_one() {
    let shipped = NoiseModel::load(data("noise.json")).unwrap();
    let line = DeviceModel::load(data("line6.json")).unwrap();
    let fresh = calibrate_depol_2q(&line.pair(0, 1).unwrap(), 0.037, shipped.depol_1q, shipped.thermal).unwrap();
    assert!((fresh.depol_2q - shipped.depol_2q).abs() < 1e-9, "{} vs {}", fresh.depol_2q, shipped.depol_2q);
}
