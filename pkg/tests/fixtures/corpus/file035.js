/* configuration block 35 */
var options35 = {
  width35: 10,
  height35: 20,
  resize35: function(scale35) {
    return scale35 * options35.width35;
  }
};
options35.resize35(2);
