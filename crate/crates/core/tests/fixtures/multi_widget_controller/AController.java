import java.awt.event.ActionEvent;
import java.awt.event.ActionListener;
import javax.swing.AbstractButton;
import javax.swing.JButton;
import javax.swing.JMenuItem;

class AController implements ActionListener {
  JButton b1;
  JButton b2;
  JMenuItem m3;

  @Override
  public void actionPerformed(ActionEvent e) {
    Object src = e.getSource();
    if (src == b1) {
      // Command 1
    } else if (src == b2) {
      // Command 2
    } else if (src instanceof AbstractButton &&
        ((AbstractButton) src).getActionCommand().equals(
            m3.getActionCommand())) {
      // Command 3
    }
  }
}
