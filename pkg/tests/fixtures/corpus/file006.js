// widget helpers for panel 6
var counter6 = 0;
function updateCounter6(delta6) {
  counter6 = counter6 + delta6;
  return counter6;
}
var message6 = "counter6 ignored";
panel6.label = message6;
