//! Self-contained HTML page listing every distinct route of a schedule,
//! with a canvas map that draws the selected route.

use std::fmt::Write;

use super::geojson::{distinct_routes, export_geojson, Routes};
use crate::error::Result;
use crate::model::{Instance, Schedule};

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const STYLE: &str = "body{font-family:sans-serif;margin:0;display:flex;height:100vh}\
#tours{width:22em;overflow-y:auto;border-right:1px solid #ccc;margin:0;padding:.5em;list-style:none}\
#tours button{width:100%;text-align:left;margin:2px 0;padding:.4em;border:1px solid #ddd;background:#fafafa;cursor:pointer}\
#tours button.active{background:#dbe9ff;border-color:#4a7fd0}\
main{flex:1;display:flex;flex-direction:column}\
#info{padding:.5em;min-height:3em;border-bottom:1px solid #ccc}\
canvas{flex:1;width:100%}";

const SCRIPT: &str = r#"(function(){
const data=JSON.parse(document.getElementById('routes').textContent);
const lines=data.features.filter(f=>f.geometry.type==='LineString');
const points=data.features.filter(f=>f.geometry.type==='Point');
const canvas=document.getElementById('map');
const info=document.getElementById('info');
const xs=points.map(p=>p.geometry.coordinates[0]),ys=points.map(p=>p.geometry.coordinates[1]);
const x0=Math.min(...xs),x1=Math.max(...xs),y0=Math.min(...ys),y1=Math.max(...ys);
let current=null;
function draw(){
  const w=canvas.width=canvas.clientWidth,h=canvas.height=canvas.clientHeight,pad=30;
  const s=Math.min((w-2*pad)/Math.max(x1-x0,1e-9),(h-2*pad)/Math.max(y1-y0,1e-9));
  const px=c=>[pad+(c[0]-x0)*s,h-pad-(c[1]-y0)*s];
  const g=canvas.getContext('2d');
  g.clearRect(0,0,w,h);
  for(const p of points){const [x,y]=px(p.geometry.coordinates);g.fillStyle=p.properties.kind==='depot'?'#c00':'#555';g.beginPath();g.arc(x,y,p.properties.kind==='depot'?6:3,0,7);g.fill();}
  if(current===null)return;
  const f=lines[current];g.strokeStyle='#1f5fbf';g.lineWidth=2;g.beginPath();
  f.geometry.coordinates.forEach((c,i)=>{const [x,y]=px(c);i?g.lineTo(x,y):g.moveTo(x,y);});g.stroke();
}
function select(i){
  current=i;
  document.querySelectorAll('.tour-entry').forEach(b=>b.classList.toggle('active',Number(b.dataset.tour)===i+1));
  const p=lines[i].properties;
  info.textContent='Tour '+p.tour_id+': drive '+p.drive_minutes+' min; '+p.stops.map((s,k)=>s+' ('+p.exams_by_stop[k]+')').join(', ');
  draw();
}
document.querySelectorAll('.tour-entry').forEach(b=>b.addEventListener('click',()=>select(Number(b.dataset.tour)-1)));
window.addEventListener('resize',draw);
if(lines.length)select(0);else draw();
})();"#;

/// Renders the page. Output depends only on `s` and `instance`.
pub fn export_html(s: &Schedule, instance: &Instance) -> Result<String> {
    let geo = export_geojson(Routes::Schedule(s), instance)?;
    let embedded = serde_json::to_string(&geo)
        .expect("geojson serializes")
        .replace("</", "<\\/");

    let mut entries = String::new();
    for (k, route) in distinct_routes(s).iter().enumerate() {
        let names: Vec<String> = route
            .stops
            .iter()
            .map(|&t| escape(instance.name(t)))
            .collect();
        let _ = writeln!(
            entries,
            "<li><button class=\"tour-entry\" data-tour=\"{}\">Tour {}: {} min drive, used {}x<br><small>{}</small></button></li>",
            k + 1,
            k + 1,
            instance.route_travel(route.stops),
            route.schedule_tours.len(),
            names.join(" &rarr; ")
        );
    }

    let mut page = String::new();
    let _ = write!(
        page,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>Tours</title>\n<style>{STYLE}</style>\n</head>\n<body>\n<ul id=\"tours\">\n{entries}</ul>\n<main>\n<div id=\"info\"></div>\n<canvas id=\"map\"></canvas>\n</main>\n<script type=\"application/geo+json\" id=\"routes\">{embedded}</script>\n<script>{SCRIPT}</script>\n</body>\n</html>\n"
    );
    Ok(page)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::{BasicTour, Params, PlannedTour};

    fn inst() -> Instance {
        Instance::new(
            vec!["C".into(), "A<1>".into(), "B".into()],
            vec![vec![0, 60, 70], vec![60, 0, 20], vec![70, 20, 0]],
            vec![0, 3, 2],
            Some(vec![(47.1, 27.6), (47.3, 27.9), (47.2, 27.8)]),
            Params::default(),
        )
        .unwrap()
    }

    fn pt(stops: Vec<usize>, exams: Vec<u32>) -> PlannedTour {
        PlannedTour::new(BasicTour::new(stops).unwrap(), exams).unwrap()
    }

    #[test]
    fn one_entry_per_distinct_tour() {
        let p = Params::default();
        let one = Schedule::from_tours(vec![pt(vec![1, 2], vec![3, 2])], &p);
        let page = export_html(&one, &inst()).unwrap();
        assert_eq!(page.matches("class=\"tour-entry\"").count(), 1);
        assert!(page.contains("A&lt;1&gt;"));

        let three = Schedule::from_tours(
            vec![pt(vec![1], vec![2]), pt(vec![2], vec![2]), pt(vec![1], vec![1])],
            &p,
        );
        let page = export_html(&three, &inst()).unwrap();
        assert_eq!(page.matches("class=\"tour-entry\"").count(), 2);
        let first = page.find("data-tour=\"1\"").unwrap();
        let second = page.find("data-tour=\"2\"").unwrap();
        assert!(first < second);
        assert_eq!(page, export_html(&three, &inst()).unwrap());
    }

    #[test]
    fn embedded_data_cannot_close_the_script() {
        let page = export_html(
            &Schedule::from_tours(vec![pt(vec![1], vec![3])], &Params::default()),
            &Instance::new(
                vec!["C".into(), "</script>".into()],
                vec![vec![0, 60], vec![60, 0]],
                vec![0, 3],
                Some(vec![(47.1, 27.6), (47.3, 27.9)]),
                Params::default(),
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(page.matches("</script>").count(), 2);
    }

    #[test]
    fn needs_coordinates() {
        let bare = Instance::from_matrix(vec![vec![0, 60], vec![60, 0]], vec![0, 2]).unwrap();
        let s = Schedule::from_tours(vec![pt(vec![1], vec![2])], &Params::default());
        assert!(matches!(export_html(&s, &bare), Err(Error::MissingCoordinates)));
    }
}
