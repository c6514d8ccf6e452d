//! Newline-delimited socket transport for the bus.
//!
//! One message per line as a flat JSON object. Report lines carry
//! `topic, seq, sim_time_ms, ue_id, ss_rsrp_dbm, cqi, dl_throughput_bps,
//! tbs_bits, config_epoch`; command lines carry `topic, seq, sim_time_ms,
//! config_epoch, element_index, state` where `element_index` is an integer or
//! the literal `"ALL"` and `state` is an integer or the full state vector.
//! Subscription notices carry `topic, seq, subscriber, subscribed_topic`.
//! The in-process transport is the default; this mirror is behavior-identical.

use super::bus::{
    BusMessage, ElementSelector, KpmReport, Payload, RisControlCommand, StateValue, Subscription,
    SubscriptionNotice,
};
use super::RicError;
use serde_json::{json, Map, Value};
use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Duration;

/// Encodes one bus message as a single JSON line (no trailing newline).
pub fn encode_line(msg: &BusMessage) -> String {
    let mut obj = Map::new();
    obj.insert("topic".into(), json!(msg.topic));
    obj.insert("seq".into(), json!(msg.seq));
    match &msg.payload {
        Payload::Kpm(r) => {
            obj.insert("sim_time_ms".into(), json!(r.sim_time_ms));
            obj.insert("ue_id".into(), json!(r.ue_id));
            obj.insert("ss_rsrp_dbm".into(), json!(r.ss_rsrp_dbm));
            obj.insert("cqi".into(), json!(r.cqi));
            obj.insert("dl_throughput_bps".into(), json!(r.dl_throughput_bps));
            obj.insert("tbs_bits".into(), json!(r.tbs_bits));
            obj.insert("config_epoch".into(), json!(r.config_epoch));
        }
        Payload::RisControl(c) => {
            obj.insert("sim_time_ms".into(), json!(c.sim_time_ms));
            obj.insert("config_epoch".into(), json!(c.config_epoch));
            obj.insert(
                "element_index".into(),
                match &c.element {
                    ElementSelector::All => json!("ALL"),
                    ElementSelector::Index(i) => json!(i),
                },
            );
            obj.insert(
                "state".into(),
                match &c.state {
                    StateValue::Single(s) => json!(s),
                    StateValue::Vector(v) => json!(v),
                },
            );
        }
        Payload::Subscription(s) => {
            obj.insert("subscriber".into(), json!(s.subscriber));
            obj.insert("subscribed_topic".into(), json!(s.topic));
        }
    }
    Value::Object(obj).to_string()
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value, RicError> {
    obj.get(name)
        .ok_or_else(|| RicError::Wire(format!("missing field '{name}'")))
}

fn as_u64(v: &Value, name: &str) -> Result<u64, RicError> {
    v.as_u64()
        .ok_or_else(|| RicError::Wire(format!("field '{name}' is not an unsigned integer")))
}

fn as_f64(v: &Value, name: &str) -> Result<f64, RicError> {
    v.as_f64()
        .ok_or_else(|| RicError::Wire(format!("field '{name}' is not a number")))
}

/// Decodes one line back into a bus message.
pub fn decode_line(line: &str) -> Result<BusMessage, RicError> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| RicError::Wire(format!("bad JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| RicError::Wire("line is not a JSON object".into()))?;
    let topic = field(obj, "topic")?
        .as_str()
        .ok_or_else(|| RicError::Wire("field 'topic' is not a string".into()))?
        .to_string();
    let seq = as_u64(field(obj, "seq")?, "seq")?;

    let payload = if obj.contains_key("ue_id") {
        Payload::Kpm(KpmReport {
            sim_time_ms: as_u64(field(obj, "sim_time_ms")?, "sim_time_ms")?,
            ue_id: as_u64(field(obj, "ue_id")?, "ue_id")? as u32,
            ss_rsrp_dbm: as_f64(field(obj, "ss_rsrp_dbm")?, "ss_rsrp_dbm")?,
            cqi: as_u64(field(obj, "cqi")?, "cqi")? as u8,
            dl_throughput_bps: as_f64(field(obj, "dl_throughput_bps")?, "dl_throughput_bps")?,
            tbs_bits: as_u64(field(obj, "tbs_bits")?, "tbs_bits")?,
            config_epoch: as_u64(field(obj, "config_epoch")?, "config_epoch")?,
        })
    } else if obj.contains_key("element_index") {
        let element = match field(obj, "element_index")? {
            Value::String(s) if s == "ALL" => ElementSelector::All,
            Value::Number(n) => ElementSelector::Index(
                n.as_u64()
                    .ok_or_else(|| RicError::Wire("element_index must be unsigned".into()))?
                    as u32,
            ),
            other => {
                return Err(RicError::Wire(format!(
                    "element_index must be an integer or \"ALL\", got {other}"
                )));
            }
        };
        let state = match field(obj, "state")? {
            Value::Number(n) => StateValue::Single(
                n.as_u64()
                    .ok_or_else(|| RicError::Wire("state must be unsigned".into()))? as u8,
            ),
            Value::Array(a) => StateValue::Vector(
                a.iter()
                    .map(|v| {
                        v.as_u64()
                            .map(|s| s as u8)
                            .ok_or_else(|| RicError::Wire("state vector entries must be unsigned".into()))
                    })
                    .collect::<Result<_, _>>()?,
            ),
            other => {
                return Err(RicError::Wire(format!(
                    "state must be an integer or an array, got {other}"
                )));
            }
        };
        Payload::RisControl(RisControlCommand {
            sim_time_ms: as_u64(field(obj, "sim_time_ms")?, "sim_time_ms")?,
            config_epoch: as_u64(field(obj, "config_epoch")?, "config_epoch")?,
            element,
            state,
        })
    } else if obj.contains_key("subscriber") {
        Payload::Subscription(SubscriptionNotice {
            subscriber: field(obj, "subscriber")?
                .as_str()
                .ok_or_else(|| RicError::Wire("field 'subscriber' is not a string".into()))?
                .to_string(),
            topic: field(obj, "subscribed_topic")?
                .as_str()
                .ok_or_else(|| RicError::Wire("field 'subscribed_topic' is not a string".into()))?
                .to_string(),
        })
    } else {
        return Err(RicError::Wire(
            "line matches no known payload kind (expected ue_id, element_index or subscriber)"
                .into(),
        ));
    };

    Ok(BusMessage { topic, seq, payload })
}

/// Forwards messages arriving on a subscription to a writer, one line each,
/// until `stop` is raised and the queue has drained. Returns the count.
pub fn pump_subscription<W: Write>(
    sub: &Subscription,
    writer: &mut W,
    stop: &AtomicBool,
) -> std::io::Result<u64> {
    let mut forwarded = 0;
    loop {
        let mut idle = true;
        while let Some(msg) = sub.try_next() {
            writeln!(writer, "{}", encode_line(&msg))?;
            forwarded += 1;
            idle = false;
        }
        if stop.load(Ordering::Acquire) && sub.is_empty() {
            writer.flush()?;
            return Ok(forwarded);
        }
        if idle {
            std::thread::sleep(Duration::from_micros(200));
        }
    }
}

/// Parses a line-delimited stream back into bus messages.
pub fn read_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<BusMessage, RicError>> {
    reader.lines().map(|line| {
        let line = line.map_err(|e| RicError::Wire(format!("read failed: {e}")))?;
        decode_line(&line)
    })
}
