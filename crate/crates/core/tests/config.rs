use scrilab::config::RunConfig;

#[test]
fn partial_json_keeps_defaults() {
    let cfg = RunConfig::from_json(r#"{"mass": 0.2, "bondi": {"iterations": 8}}"#).unwrap();
    assert_eq!(cfg.mass, 0.2);
    assert_eq!(cfg.bondi.iterations, 8);
    assert_eq!(cfg.gamma_c, RunConfig::default().gamma_c);
    cfg.validate().unwrap();
}

#[test]
fn unknown_fields_are_rejected() {
    assert!(RunConfig::from_json(r#"{"mas": 0.2}"#).is_err());
    assert!(RunConfig::from_json(r#"{"bondi": {"iters": 8}}"#).is_err());
}

#[test]
fn env_overrides_and_validation() {
    let mut cfg = RunConfig::default();
    let env = [("SCRILAB_GAMMAC", "0.6"), ("SCRILAB_DETERMINISTIC", "1"), ("HOME", "/x")];
    cfg.apply_env(env.iter().map(|(k, v)| (k.to_string(), v.to_string()))).unwrap();
    assert_eq!(cfg.gamma_c, 0.6);
    assert!(cfg.deterministic);

    let mut bad = RunConfig::default();
    assert!(bad.apply_env([("SCRILAB_MASS".to_string(), "heavy".to_string())]).is_err());
    bad.gamma_u = 0.1;
    assert!(bad.validate().is_err());
    let slow = RunConfig { ell_i: 0.6, ..RunConfig::default() };
    assert!(slow.validate().is_err());
}

#[test]
fn defaults_round_trip_through_json() {
    let text = serde_json::to_string(&RunConfig::default()).unwrap();
    let back = RunConfig::from_json(&text).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}
