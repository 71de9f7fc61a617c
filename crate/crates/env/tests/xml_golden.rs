//! Golden tests for the XML task-variant emitter. Expected strings are the
//! published model mutations for each benchmark task (XML lines only).

use offdyn_core::task::{all_task_names, parse_task_name};
use offdyn_env::emit_mujoco_xml;

fn emit(task: &str) -> String {
    let id = parse_task_name(task).unwrap();
    let mut files = emit_mujoco_xml(&id).unwrap();
    assert_eq!(files.len(), 1);
    let (name, text) = files.remove(0);
    assert_eq!(name, format!("{task}.xml"));
    text
}

fn assert_lines(task: &str, expected: &str) {
    let got = emit(task);
    let want: Vec<&str> = expected.trim().lines().map(str::trim).collect();
    let have: Vec<&str> = got.trim().lines().collect();
    assert_eq!(have, want, "fragment mismatch for {task}");
}

#[test]
fn hopper_friction_5_0() {
    assert_lines(
        "hopper-friction-5.0",
        r#"
<geom friction="4.5" fromto="0 0 1.45 0 0 1.05" name="torso_geom" size="0.05" type="capsule"/>
<geom friction="4.5" fromto="0 0 1.05 0 0 0.6" name="thigh_geom" size="0.05" type="capsule"/>
<geom friction="4.5" fromto="0 0 0.6 0 0 0.1" name="leg_geom" size="0.04" type="capsule"/>
<geom friction="10.0" fromto="-0.13 0 0.1 0.26 0 0.1" name="foot_geom" size="0.06" type="capsule"/>
"#,
    );
}

#[test]
fn friction_levels_scale_all_components() {
    let t = emit("hopper-friction-0.1");
    assert!(t.contains(r#"friction="0.09""#));
    assert!(t.contains(r#"friction="0.2""#));
    let t = emit("hopper-friction-0.5");
    assert!(t.contains(r#"friction="0.45""#));
    assert!(t.contains(r#"friction="1.0""#));
    let t = emit("hopper-friction-2.0");
    assert!(t.contains(r#"friction="1.8""#));
    assert!(t.contains(r#"friction="4.0""#));
    let t = emit("ant-friction-0.5");
    assert!(t.contains(r#"friction="0.5 0.25 0.25""#), "{t}");
    let t = emit("halfcheetah-friction-2.0");
    assert!(t.contains(r#"friction="0.8 0.2 0.2""#), "{t}");
}

#[test]
fn halfcheetah_gravity_0_5() {
    assert_lines(
        "halfcheetah-gravity-0.5",
        r#"<option gravity="0 0 -4.905" timestep="0.01"/>"#,
    );
}

#[test]
fn gravity_levels_are_exact_decimals() {
    assert!(emit("ant-gravity-0.1").contains(r#"gravity="0 0 -0.981""#));
    assert!(emit("walker2d-gravity-2.0").contains(r#"gravity="0 0 -19.62""#));
    assert!(emit("hopper-gravity-5.0").contains(r#"gravity="0 0 -49.05""#));
}

#[test]
fn ant_kinematic_hipjnt_all_levels() {
    assert_lines(
        "ant-kinematic-hipjnt-easy",
        r#"
<joint axis="0 0 1" name="hip_1" pos="0.0 0.0 0.0" range="-24 24" type="hinge"/>
<joint axis="0 0 1" name="hip_2" pos="0.0 0.0 0.0" range="-24 24" type="hinge"/>
<joint axis="0 0 1" name="hip_3" pos="0.0 0.0 0.0" range="-24 24" type="hinge"/>
<joint axis="0 0 1" name="hip_4" pos="0.0 0.0 0.0" range="-24 24" type="hinge"/>
"#,
    );
    assert!(emit("ant-kinematic-hipjnt-medium").contains(r#"range="-15 15""#));
    assert!(emit("ant-kinematic-hipjnt-hard").contains(r#"range="-6 6""#));
}

#[test]
fn ant_kinematic_anklejnt_all_levels() {
    assert_lines(
        "ant-kinematic-anklejnt-easy",
        r#"
<joint axis="-1 1 0" name="ankle_1" pos="0.0 0.0 0.0" range="30 62" type="hinge"/>
<joint axis="1 1 0" name="ankle_2" pos="0.0 0.0 0.0" range="-62 -30" type="hinge"/>
<joint axis="-1 1 0" name="ankle_3" pos="0.0 0.0 0.0" range="-62 -30" type="hinge"/>
<joint axis="1 1 0" name="ankle_4" pos="0.0 0.0 0.0" range="30 62" type="hinge"/>
"#,
    );
    assert!(emit("ant-kinematic-anklejnt-medium").contains(r#"range="30 50""#));
    assert!(emit("ant-kinematic-anklejnt-hard").contains(r#"range="-38 -30""#));
}

#[test]
fn halfcheetah_kinematic_tables() {
    assert_lines(
        "halfcheetah-kinematic-footjnt-easy",
        r#"
<joint axis="0 1 0" damping="3" name="bfoot" pos="0 0 0" range="-.32 .628" stiffness="120" type="hinge"/>
<joint axis="0 1 0" damping="1.5" name="ffoot" pos="0 0 0" range="-.4 .4" stiffness="60" type="hinge"/>
"#,
    );
    assert!(emit("halfcheetah-kinematic-footjnt-medium").contains(r#"range="-.2 .3925""#));
    assert!(emit("halfcheetah-kinematic-footjnt-hard").contains(r#"range="-.08 .157""#));
    assert_lines(
        "halfcheetah-kinematic-thighjnt-medium",
        r#"
<joint axis="0 1 0" damping="6" name="bthigh" pos="0 0 0" range="-.26 .525" stiffness="240" type="hinge"/>
<joint axis="0 1 0" damping="4.5" name="fthigh" pos="0 0 0" range="-.5 .35" stiffness="180" type="hinge"/>
"#,
    );
    assert!(emit("halfcheetah-kinematic-thighjnt-easy").contains(r#"range="-.416 .84""#));
    assert!(emit("halfcheetah-kinematic-thighjnt-hard").contains(r#"range="-.104 .21""#));
}

#[test]
fn hopper_and_walker_kinematic_tables() {
    assert_lines(
        "hopper-kinematic-footjnt-medium",
        r#"<joint axis="0 -1 0" name="foot_joint" pos="0 0 0.1" range="-22.5 22.5" type="hinge"/>"#,
    );
    assert!(emit("hopper-kinematic-footjnt-easy").contains(r#"range="-36 36""#));
    assert!(emit("hopper-kinematic-footjnt-hard").contains(r#"range="-9 9""#));
    assert_lines(
        "hopper-kinematic-legjnt-hard",
        r#"<joint axis="0 -1 0" name="leg_joint" pos="0 0 0.6" range="-30 0" type="hinge"/>"#,
    );
    assert!(emit("hopper-kinematic-legjnt-easy").contains(r#"range="-120 0""#));
    assert!(emit("hopper-kinematic-legjnt-medium").contains(r#"range="-75 0""#));
    assert_lines(
        "walker2d-kinematic-footjnt-easy",
        r#"
<joint axis="0 -1 0" name="foot_joint" pos="0 0 0.1" range="-36 36" type="hinge"/>
<joint axis="0 -1 0" name="foot_left_joint" pos="0 0 0.1" range="-36 36" type="hinge"/>
"#,
    );
    assert_lines(
        "walker2d-kinematic-thighjnt-medium",
        r#"
<joint axis="0 -1 0" name="thigh_joint" pos="0 0 1.05" range="-75 0" type="hinge"/>
<joint axis="0 -1 0" name="thigh_left_joint" pos="0 0 1.05" range="-75 0" type="hinge"/>
"#,
    );
}

#[test]
fn ant_morph_tables() {
    assert_lines(
        "ant-morph-halflegs-medium",
        r#"
<geom fromto="0.0 0.0 0.0 0.2 0.2 0.0" name="left_ankle_geom" size="0.08" type="capsule"/>
<geom fromto="0.0 0.0 0.0 -0.2 0.2 0.0" name="right_ankle_geom" size="0.08" type="capsule"/>
"#,
    );
    assert_lines(
        "ant-morph-alllegs-hard",
        r#"
<geom fromto="0.0 0.0 0.0 0.08 0.08 0.0" name="left_ankle_geom" size="0.08" type="capsule"/>
<geom fromto="0.0 0.0 0.0 -0.08 0.08 0.0" name="right_ankle_geom" size="0.08" type="capsule"/>
<geom fromto="0.0 0.0 0.0 -0.08 -0.08 0.0" name="third_ankle_geom" size="0.08" type="capsule"/>
<geom fromto="0.0 0.0 0.0 0.08 -0.08 0.0" name="fourth_ankle_geom" size="0.08" type="capsule"/>
"#,
    );
    assert!(emit("ant-morph-halflegs-easy").contains("0.32 0.32 0.0"));
}

#[test]
fn halfcheetah_morph_tables() {
    assert_lines(
        "halfcheetah-morph-thigh-easy",
        r#"
<geom fromto="0 0 0 0.11 0 -0.11" name="bthigh" size="0.046" type="capsule"/>
<body name="bshin" pos="0.11 0 -0.11">
<geom fromto="0 0 0 -.13 0 -.15" name="bshin" rgba="0.9 0.6 0.6 1" size="0.046" type="capsule"/>
<body name="bfoot" pos="-.13 0 -.15">
<geom fromto="0 0 0 -0.09 0 -0.1" name="fthigh" size="0.046" type="capsule"/>
<body name="fshin" pos="-0.09 0 -0.1">
<geom fromto="0 0 0 .11 0 -.13" name="fshin" rgba="0.9 0.6 0.6 1" size="0.046" type="capsule"/>
<body name="ffoot" pos=".11 0 -.13">
"#,
    );
    assert!(emit("halfcheetah-morph-thigh-medium").contains(r#"pos="0.08 0 -0.08""#));
    assert!(emit("halfcheetah-morph-thigh-hard").contains(r#"fromto="0 0 0 -0.04 0 -0.05""#));
    assert_lines(
        "halfcheetah-morph-torso-medium",
        r#"
<geom fromto="-.25 0 0 .25 0 0" name="torso" size="0.046" type="capsule"/>
<geom axisangle="0 1 0 .87" name="head" pos=".35 0 .1" size="0.046 .15" type="capsule"/>
<body name="bthigh" pos="-.25 0 0">
<body name="fthigh" pos=".25 0 0">
"#,
    );
    assert!(emit("halfcheetah-morph-torso-easy").contains(r#"fromto="-.4 0 0 .4 0 0""#));
    assert!(emit("halfcheetah-morph-torso-hard").contains(r#"pos=".2 0 .1""#));
}

#[test]
fn hopper_morph_tables() {
    assert_lines(
        "hopper-morph-foot-easy",
        r#"<geom friction="2.0" fromto="-0.104 0 0.1 0.208 0 0.1" name="foot_geom" size="0.048" type="capsule"/>"#,
    );
    assert_lines(
        "hopper-morph-foot-medium",
        r#"<geom friction="2.0" fromto="-0.078 0 0.1 0.156 0 0.1" name="foot_geom" size="0.036" type="capsule"/>"#,
    );
    assert_lines(
        "hopper-morph-foot-hard",
        r#"<geom friction="2.0" fromto="-0.052 0 0.1 0.104 0 0.1" name="foot_geom" size="0.024" type="capsule"/>"#,
    );
    assert_lines(
        "hopper-morph-torso-easy",
        r#"<geom friction="0.9" fromto="0 0 1.53 0 0 1.05" name="torso_geom" size="0.075" type="capsule"/>"#,
    );
    assert_lines(
        "hopper-morph-torso-medium",
        r#"<geom friction="0.9" fromto="0 0 1.69 0 0 1.05" name="torso_geom" size="0.1" type="capsule"/>"#,
    );
}

#[test]
fn walker2d_morph_tables() {
    assert_lines(
        "walker2d-morph-torso-hard",
        r#"<geom friction="0.9" fromto="0 0 1.85 0 0 1.05" name="torso_geom" size="0.125" type="capsule"/>"#,
    );
    assert_lines(
        "walker2d-morph-leg-medium",
        r#"
<geom friction="0.9" fromto="0 0 1.05 0 0 0.35" name="thigh_geom" size="0.05" type="capsule"/>
<joint axis="0 -1 0" name="leg_joint" pos="0 0 0.35" range="-150 0" type="hinge"/>
<geom friction="0.9" fromto="0 0 0.35 0 0 0.1" name="leg_geom" size="0.04" type="capsule"/>
<geom friction="0.9" fromto="0 0 1.05 0 0 0.35" name="thigh_left_geom" rgba=".7 .3 .6 1" size="0.05" type="capsule"/>
<joint axis="0 -1 0" name="leg_left_joint" pos="0 0 0.35" range="-150 0" type="hinge"/>
<geom friction="0.9" fromto="0 0 0.35 0 0 0.1" name="leg_left_geom" rgba=".7 .3 .6 1" size="0.04" type="capsule"/>
"#,
    );
    assert!(emit("walker2d-morph-leg-easy").contains(r#"fromto="0 0 1.05 0 0 0.5""#));
    assert!(emit("walker2d-morph-leg-hard").contains(r#"fromto="0 0 0.2 0 0 0.1""#));
}

#[test]
fn adroit_broken_joint_tables() {
    let easy = r#"
<joint name="FFJ3" pos="0 0 0" axis="0 1 0" range="-0.218 0.218" user="1103" />
<joint name="FFJ2" pos="0 0 0" axis="1 0 0" range="0 0.7855" user="1102" />
<joint name="FFJ1" pos="0 0 0" axis="1 0 0" range="0 0.7855" user="1101" />
<joint name="FFJ0" pos="0 0 0" axis="1 0 0" range="0 0.7855" user="1100" />
<joint name="THJ4" pos="0 0 0" axis="0 0 -1" range="-0.5235 0.5235" user="1121" />
<joint name="THJ3" pos="0 0 0" axis="1 0 0" range="0 0.6545" user="1120" />
<joint name="THJ2" pos="0 0 0" axis="1 0 0" range="-0.131 0.131" user="1119" />
<joint name="THJ1" pos="0 0 0" axis="0 1 0" range="-0.262 0.262" user="1118" />
<joint name="THJ0" pos="0 0 0" axis="0 1 0" range="-0.785 0" user="1117" />
"#;
    // All four manipulation families share the same hand mutation.
    for family in ["pen", "door", "relocate", "hammer"] {
        assert_lines(&format!("{family}-broken-joint-easy"), easy);
    }
    let medium = emit("pen-broken-joint-medium");
    assert!(medium.contains(r#"range="-0.109 0.109""#));
    assert!(medium.contains(r#"range="0 0.39275""#));
    assert!(medium.contains(r#"range="-0.26175 0.26175""#));
    assert!(medium.contains(r#"range="0 0.32725""#));
    assert!(medium.contains(r#"range="-0.0655 0.0655""#));
    assert!(medium.contains(r#"range="-0.131 0.131""#));
    assert!(medium.contains(r#"range="-0.3925 0""#));
    let hard = emit("door-broken-joint-hard");
    assert!(hard.contains(r#"range="-0.0545 0.0545""#));
    assert!(hard.contains(r#"range="0 0.196375""#));
    assert!(hard.contains(r#"range="-0.130875 0.130875""#));
    assert!(hard.contains(r#"range="0 0.163625""#));
    assert!(hard.contains(r#"range="-0.03275 0.03275""#));
    assert!(hard.contains(r#"range="-0.0655 0.0655""#));
    assert!(hard.contains(r#"range="-0.19625 0""#));
}

#[test]
fn adroit_shrink_finger_tables() {
    let easy = emit("pen-shrink-finger-easy");
    assert!(easy.contains(r#"<geom name="C_ffproximal" class="DC_Hand" size="0.01 0.01125" pos="0 0 0.01125" type="capsule" />"#));
    assert!(easy.contains(r#"<body name="ffmiddle" pos="0 0 0.0225">"#));
    assert!(easy.contains(r#"<site name="S_fftip" pos="0 0 0.013" group="3" />"#));
    assert!(easy.contains(r#"<body name="lfknuckle" pos="-0.017 0 0.022">"#));

    let medium = emit("hammer-shrink-finger-medium");
    assert!(medium.contains(r#"size="0.01 0.005625""#));
    assert!(medium.contains(r#"<body name="ffdistal" pos="0 0 0.00625">"#));
    assert!(medium.contains(r#"<body name="lfknuckle" pos="-0.017 0 0.011">"#));
    assert!(medium.contains(r#"<geom name="V_rfdistal" class="D_Vizual" pos="0 0 0.00025" mesh="F1" />"#));

    let hard = emit("relocate-shrink-finger-hard");
    assert!(hard.contains(r#"size="0.01 0.0028125""#));
    assert!(hard.contains(r#"<geom name="C_ffmiddle" class="DC_Hand" size="0.00805 0.0015625" pos="0 0 0.0015625" type="capsule" />"#));
    assert!(hard.contains(r#"<body name="lfknuckle" pos="-0.017 0 0.0055">"#));
    assert!(hard.contains(r#"<site name="Tch_fftip" class="D_Touch" pos="0 -0.004 0.00225" />"#));
}

#[test]
fn antmaze_fragments_render_layout_grids() {
    let small = emit("antmaze-small-empty");
    assert!(small.contains("<!-- ########"));
    assert!(small.contains(r#"<site name="start" pos="1.5 1.5 0" size="0.2"/>"#));
    assert!(small.contains(r#"<site name="goal" pos="6.5 6.5 0" size="0.2"/>"#));
    let medium = emit("antmaze-medium-3");
    assert!(medium.contains("block_"));
    let large = emit("antmaze-large-6");
    assert!(large.contains("(9 x 12)"));
}

#[test]
fn full_mujoco_registry_emits_and_stays_stable() {
    let mut count = 0;
    for name in all_task_names() {
        let id = parse_task_name(&name).unwrap();
        if id.env_family.is_desk() {
            continue;
        }
        let a = emit_mujoco_xml(&id).unwrap();
        let b = emit_mujoco_xml(&id).unwrap();
        assert_eq!(a, b, "emitter not pure for {name}");
        count += 1;
    }
    assert_eq!(count, 122);
}
